//! Argument parsing helpers.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use dickman_lab::primes::{PrimeSubset, SubsetSpec};

/// `--subset` before any file is read.
#[derive(Debug, Clone, PartialEq)]
pub enum SubsetArg {
    All,
    Residue { modulus: u64, residue: u64 },
    File(PathBuf),
}

impl FromStr for SubsetArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "all" {
            return Ok(SubsetArg::All);
        }
        if let Some(rest) = s.strip_prefix("residue:") {
            let (l, j) = rest
                .split_once(':')
                .ok_or_else(|| format!("expected residue:L:J, got {s:?}"))?;
            let modulus = l.parse().map_err(|_| format!("bad modulus {l:?}"))?;
            let residue = j.parse().map_err(|_| format!("bad residue {j:?}"))?;
            return Ok(SubsetArg::Residue { modulus, residue });
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(SubsetArg::File(PathBuf::from(path)));
        }
        Err(format!("expected all, residue:L:J or file:PATH, got {s:?}"))
    }
}

impl SubsetArg {
    /// Resolve against `--theta`, which is required for file subsets and
    /// rejected otherwise.
    pub fn spec(&self, theta: Option<f64>) -> Result<SubsetSpec> {
        match (self, theta) {
            (SubsetArg::File(path), Some(theta)) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading --subset file {}", path.display()))?;
                Ok(SubsetSpec::Explicit { primes: parse_prime_file(&text)?, theta })
            }
            (SubsetArg::File(_), None) => bail!("--theta is required with a file: subset"),
            (_, Some(_)) => bail!("--theta only applies to file: subsets here"),
            (SubsetArg::All, None) => Ok(SubsetSpec::All),
            (SubsetArg::Residue { modulus, residue }, None) => {
                Ok(SubsetSpec::Residue { modulus: *modulus, residue: *residue })
            }
        }
    }

    /// Materialize the subset up to `limit`.
    pub fn build(&self, theta: Option<f64>, limit: u64) -> Result<PrimeSubset> {
        Ok(PrimeSubset::up_to(self.spec(theta)?, limit.max(2))?)
    }

    /// The first `count` primes of the subset. A file subset needs no
    /// declared density here, since only its members are used.
    pub fn first_primes(&self, count: usize) -> Result<Vec<u64>> {
        let theta = matches!(self, SubsetArg::File(_)).then_some(1.0);
        Ok(self.build_count(theta, count)?.first(count)?.to_vec())
    }

    /// Materialize at least `count` primes.
    pub fn build_count(&self, theta: Option<f64>, count: usize) -> Result<PrimeSubset> {
        Ok(PrimeSubset::with_at_least(self.spec(theta)?, count)?)
    }
}

/// Primes separated by commas or whitespace; `#` starts a comment.
fn parse_prime_file(text: &str) -> Result<Vec<u64>> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(|line| line.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|tok| !tok.is_empty())
        .map(|tok| tok.parse::<u64>().map_err(|_| anyhow!("bad prime {tok:?} in subset file")))
        .collect()
}

/// Nonnegative integer, also accepting `1e6` and `10^6`.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim().replace('_', "");
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    if let Some((base, exp)) = s.split_once('^') {
        let base: u64 = base.parse().map_err(|_| format!("bad integer {s:?}"))?;
        let exp: u32 = exp.parse().map_err(|_| format!("bad integer {s:?}"))?;
        return base.checked_pow(exp).ok_or_else(|| format!("{s} overflows"));
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(x as u64),
        _ => Err(format!("expected a nonnegative integer, got {s:?}")),
    }
}

pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("expected a finite number, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_forms() {
        assert_eq!("all".parse::<SubsetArg>().unwrap(), SubsetArg::All);
        assert_eq!(
            "residue:4:1".parse::<SubsetArg>().unwrap(),
            SubsetArg::Residue { modulus: 4, residue: 1 }
        );
        assert_eq!(
            "file:p.txt".parse::<SubsetArg>().unwrap(),
            SubsetArg::File(PathBuf::from("p.txt"))
        );
        assert!("residue:4".parse::<SubsetArg>().is_err());
        assert!("odd".parse::<SubsetArg>().is_err());
    }

    #[test]
    fn theta_rules() {
        assert!(SubsetArg::All.spec(Some(0.5)).is_err());
        assert!(SubsetArg::File("x".into()).spec(None).is_err());
        assert_eq!(SubsetArg::All.spec(None).unwrap(), SubsetSpec::All);
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1000").unwrap(), 1000);
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_count("10^5").unwrap(), 100_000);
        assert_eq!(parse_count("1_000").unwrap(), 1000);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn prime_file() {
        let text = "# first primes\n2, 3 5\n7 # trailing\n\n11\n";
        assert_eq!(parse_prime_file(text).unwrap(), vec![2, 3, 5, 7, 11]);
        assert!(parse_prime_file("2 x").is_err());
    }
}
