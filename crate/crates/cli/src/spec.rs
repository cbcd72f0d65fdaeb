//! Flat key-value function files.
//!
//! ```text
//! # f = x^3 + x
//! ell = 1
//! orders = 3
//! coeff 1 1 = 1
//! coeff 1 3 = 1
//! ```
//!
//! `ell` is optional (it defaults to the number of orders), `poles` is an
//! optional comma list starting with `inf`, and `coeff J I = VALUE` sets
//! `a_{J,I}` to an integer or fraction. Missing coefficients are zero.

use ascover_core::nt::Q;
use ascover_core::ratfun::{validate, FunctionSpec, Pole, RationalFunction};
use num_bigint::BigInt;

use crate::CliError;

fn bad(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("line {line}: {msg}"))
}

pub fn parse_rational(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("'{s}' is not a rational number"))?;
    let d: BigInt = d.parse().map_err(|_| format!("'{s}' is not a rational number"))?;
    if d == BigInt::from(0) {
        return Err(format!("'{s}' has a zero denominator"));
    }
    Ok(Q::new(n, d))
}

pub fn parse_orders(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| format!("'{x}' is not a pole order")))
        .collect()
}

fn parse_pole(s: &str) -> Result<Pole, String> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        Ok(Pole::Infinity)
    } else {
        parse_rational(s).map(Pole::Finite)
    }
}

/// Parses the text of a function file.
pub fn parse_spec(text: &str) -> Result<FunctionSpec, CliError> {
    let mut ell = None;
    let mut orders = None;
    let mut poles = None;
    let mut coeffs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| bad(line, "expected 'key = value'"))?;
        let key = key.trim();
        let value = value.trim();
        let mut words = key.split_whitespace();
        match words.next() {
            Some("ell") => ell = Some(value.parse::<usize>().map_err(|_| bad(line, "ell must be a positive integer"))?),
            Some("orders") => orders = Some(parse_orders(value).map_err(|e| bad(line, e))?),
            Some("poles") => {
                poles = Some(
                    value
                        .split(',')
                        .map(parse_pole)
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| bad(line, e))?,
                )
            }
            Some("coeff") => {
                let j: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| bad(line, "coeff needs a pole index"))?;
                let i: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| bad(line, "coeff needs an exponent"))?;
                if words.next().is_some() {
                    return Err(bad(line, "coeff takes exactly two indices"));
                }
                coeffs.push((j, i, parse_rational(value).map_err(|e| bad(line, e))?));
            }
            Some(other) => return Err(bad(line, format!("unknown key '{other}'"))),
            None => return Err(bad(line, "missing key")),
        }
    }
    let orders = orders.ok_or_else(|| CliError::Input("missing 'orders'".into()))?;
    Ok(FunctionSpec {
        ell: ell.unwrap_or(orders.len()),
        orders,
        poles,
        coeffs,
    })
}

/// Parses and validates, listing every violation.
pub fn load_function(text: &str) -> Result<RationalFunction, CliError> {
    let spec = parse_spec(text)?;
    validate(&spec).map_err(|vs| {
        let list: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
        CliError::Input(format!("invalid function: {}", list.join("; ")))
    })
}

/// Inline form: the same grammar with `;` separating lines.
pub fn load_inline(text: &str) -> Result<RationalFunction, CliError> {
    load_function(&text.replace(';', "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ascover_core::nt::{q, qi};

    #[test]
    fn parses_the_documented_example() {
        let f = load_function("# f = x^3 + x\nell = 1\norders = 3\ncoeff 1 1 = 1\ncoeff 1 3 = 1\n").unwrap();
        assert_eq!(f.orders(), [3]);
        assert_eq!(f.coeff(1, 1), &qi(1));
        assert_eq!(f.coeff(1, 2), &qi(0));
    }

    #[test]
    fn poles_and_fractions() {
        let f = load_inline("orders = 2,1; poles = inf, 3; coeff 1 2 = -2/4; coeff 2 1 = 5").unwrap();
        assert_eq!(f.poles()[1], Pole::Finite(qi(3)));
        assert_eq!(f.coeff(1, 2), &q(-1, 2));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_spec("orders 3"), Err(CliError::Input(_))));
        assert!(matches!(parse_spec("orders = 3\nfoo = 1"), Err(CliError::Input(_))));
        assert!(matches!(parse_spec("coeff 1 1 = 1"), Err(CliError::Input(_))));
        assert!(matches!(parse_spec("orders = 3\ncoeff 1 = 1"), Err(CliError::Input(_))));
        assert!(matches!(parse_spec("orders = 3\ncoeff 1 1 = 1/0"), Err(CliError::Input(_))));
        let err = load_function("orders = 3\ncoeff 1 1 = 1").unwrap_err();
        assert!(err.to_string().contains("leading coefficient"));
    }
}
