//! Size lists given on the command line.
//!
//! Accepted forms: a single value (`256`), a comma list (`64,128,200`), a
//! geometric range `a:b:xK` (multiply by `K` until exceeding `b`) and an
//! arithmetic range `a:b:+K` or `a:b:K`.

use std::fmt;
use std::str::FromStr;

/// Upper bound on the number of values a range may expand to.
const MAX_VALUES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeList(Vec<usize>);

impl SizeList {
    pub fn single(n: usize) -> Self {
        Self(vec![n])
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn parse_count(s: &str) -> Result<usize, String> {
    let v: usize = s
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a positive integer"))?;
    if v == 0 {
        return Err("sizes must be positive".into());
    }
    Ok(v)
}

impl FromStr for SizeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(format!(
                    "range '{s}' must look like start:stop:xFACTOR or start:stop:+STEP"
                ));
            }
            let (start, stop) = (parse_count(parts[0])?, parse_count(parts[1])?);
            if start > stop {
                return Err(format!("range '{s}' has start above stop"));
            }
            let step = parts[2].trim();
            let mut values = Vec::new();
            if let Some(factor) = step.strip_prefix('x') {
                let factor = parse_count(factor)?;
                if factor < 2 {
                    return Err("geometric factor must be at least 2".into());
                }
                let mut v = start;
                while v <= stop {
                    values.push(v);
                    v = match v.checked_mul(factor) {
                        Some(next) => next,
                        None => break,
                    };
                }
            } else {
                let inc = parse_count(step.strip_prefix('+').unwrap_or(step))?;
                if (stop - start) / inc >= MAX_VALUES {
                    return Err(format!(
                        "range '{s}' expands to more than {MAX_VALUES} values"
                    ));
                }
                values.extend((start..=stop).step_by(inc));
            }
            return Ok(Self(values));
        }
        let values = s
            .split(',')
            .map(parse_count)
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() > MAX_VALUES {
            return Err(format!("more than {MAX_VALUES} sizes"));
        }
        Ok(Self(values))
    }
}

impl fmt::Display for SizeList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Vec<usize> {
        s.parse::<SizeList>().unwrap().values().to_vec()
    }

    #[test]
    fn geometric_range() {
        assert_eq!(parse("64:1024:x2"), vec![64, 128, 256, 512, 1024]);
        assert_eq!(parse("10:100:x3"), vec![10, 30, 90]);
    }

    #[test]
    fn arithmetic_range_and_lists() {
        assert_eq!(parse("10:30:+10"), vec![10, 20, 30]);
        assert_eq!(parse("10:25:5"), vec![10, 15, 20, 25]);
        assert_eq!(parse("7"), vec![7]);
        assert_eq!(parse("15, 20,25"), vec![15, 20, 25]);
    }

    #[test]
    fn malformed_input_is_rejected() {
        for bad in ["", "0", "a", "10:5:x2", "1:9:x1", "1:9", "1:9:+0", "-3"] {
            assert!(bad.parse::<SizeList>().is_err(), "{bad}");
        }
    }
}
