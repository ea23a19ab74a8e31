//! Numbers with an optional multiple of pi: `1.5`, `pi`, `2pi`, `pi/3`,
//! `-3*pi/2`, `100 pi`, `1e-3`.

use std::f64::consts::PI;

pub fn parse_quantity(raw: &str) -> Result<f64, String> {
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
    if s.is_empty() {
        return Err("empty value".into());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s.as_str(), None),
    };
    let mut value = parse_factor(num).ok_or_else(|| format!("cannot parse `{raw}` as a number"))?;
    if let Some(d) = den {
        let d = parse_factor(d).ok_or_else(|| format!("cannot parse `{raw}` as a number"))?;
        if d == 0.0 {
            return Err(format!("division by zero in `{raw}`"));
        }
        value /= d;
    }
    if !value.is_finite() {
        return Err(format!("`{raw}` is not finite"));
    }
    Ok(value)
}

/// `[sign][coefficient][*]pi` or a plain float.
fn parse_factor(s: &str) -> Option<f64> {
    match s.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().ok()?,
            };
            Some(c * PI)
        }
        None => s.parse::<f64>().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_quantity("1.5").unwrap(), 1.5);
        assert_eq!(parse_quantity("pi").unwrap(), PI);
        assert_eq!(parse_quantity("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_quantity("pi/3").unwrap(), PI / 3.0);
        assert_eq!(parse_quantity("-3*pi/2").unwrap(), -3.0 * PI / 2.0);
        assert_eq!(parse_quantity("100 pi").unwrap(), 100.0 * PI);
        assert_eq!(parse_quantity("1e-3").unwrap(), 1e-3);
        assert_eq!(parse_quantity("-pi").unwrap(), -PI);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_quantity("").is_err());
        assert!(parse_quantity("pie").is_err());
        assert!(parse_quantity("1/0").is_err());
        assert!(parse_quantity("inf").is_err());
        assert!(parse_quantity("2*").is_err());
    }
}
