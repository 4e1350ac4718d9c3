use num_traits::Signed;

use super::monomial::{Monomial, Var};
use super::polynomial::{Coefficient, Polynomial};
use crate::error::{Error, Result};
use crate::tensor::Dims;

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

fn write_monomial(out: &mut String, m: &Monomial, dims: &Dims) {
    for &(v, e) in m.factors() {
        let idx = dims.multi_index(v as usize);
        let parts: Vec<String> = idx.entries().iter().map(|i| i.to_string()).collect();
        out.push_str("*x[");
        out.push_str(&parts.join(","));
        out.push(']');
        if e > 1 {
            out.push('^');
            out.push_str(&e.to_string());
        }
    }
}

/// Renders `c*x[1,2]*x[2,1] - c*x[1,1]^2 + c` with 1-based tensor indices.
pub fn to_text<C: Coefficient + Signed>(p: &Polynomial<C>, dims: &Dims) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().iter().enumerate() {
        if k == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        out.push_str(&c.abs().to_string());
        write_monomial(&mut out, m, dims);
    }
    out
}

fn parse_var(tok: &str, dims: &Dims) -> Result<(Var, u32)> {
    let (base, exp) = match tok.split_once('^') {
        Some((b, e)) => {
            (b.trim(), e.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?)
        }
        None => (tok, 1),
    };
    let inner = base
        .strip_prefix("x[")
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected x[..] in {tok:?}")))?;
    let idx: Vec<usize> = inner
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("bad index in {tok:?}")))?;
    let lin = dims.linear_index(&idx).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((lin as Var, exp))
}

fn parse_term<C: Coefficient>(body: &str, negative: bool, dims: &Dims) -> Result<(Monomial, C)> {
    let mut coeff = C::one();
    let mut pairs = Vec::new();
    for factor in body.split('*') {
        let f = factor.trim();
        if f.is_empty() {
            return parse_err(format!("empty factor in {body:?}"));
        }
        if f.starts_with('x') {
            pairs.push(parse_var(f, dims)?);
        } else {
            let c: C = f.parse().map_err(|_| Error::Parse(format!("bad coefficient {f:?}")))?;
            coeff = coeff * c;
        }
    }
    if negative {
        coeff = -coeff;
    }
    Ok((Monomial::from_pairs(pairs), coeff))
}

/// Inverse of [`to_text`]. Accepts any term order, implicit unit
/// coefficients and repeated monomials.
pub fn parse<C: Coefficient>(text: &str, dims: &Dims) -> Result<Polynomial<C>> {
    let s = text.trim();
    if s.is_empty() {
        return parse_err("empty polynomial");
    }
    let mut terms = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut negative = false;
    let bytes = s.as_bytes();
    let mut pending_sign = true;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'[' => depth += 1,
            b']' => depth = depth.checked_sub(1).ok_or_else(|| Error::Parse("unbalanced ]".into()))?,
            b'+' | b'-' if depth == 0 => {
                let body = s[start..i].trim();
                if body.is_empty() {
                    if !pending_sign {
                        return parse_err(format!("dangling operator at byte {i}"));
                    }
                    if b == b'-' {
                        negative = !negative;
                    }
                } else {
                    terms.push(parse_term::<C>(body, negative, dims)?);
                    negative = b == b'-';
                }
                pending_sign = true;
                start = i + 1;
                continue;
            }
            _ => {}
        }
        if !b.is_ascii_whitespace() {
            pending_sign = false;
        }
    }
    if depth != 0 {
        return parse_err("unbalanced [");
    }
    let body = s[start..].trim();
    if body.is_empty() {
        return parse_err("trailing operator");
    }
    terms.push(parse_term::<C>(body, negative, dims)?);
    Ok(Polynomial::from_terms(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type P = Polynomial<BigRational>;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn dims(s: &str) -> Dims {
        s.parse().unwrap()
    }

    #[test]
    fn renders_minor() {
        let d = dims("2x2");
        let f = P::from_terms([(Monomial::from_vars([1, 2]), q(1, 1)), (Monomial::from_vars([0, 3]), q(-1, 1))]);
        assert_eq!(to_text(&f, &d), "1*x[1,2]*x[2,1] - 1*x[1,1]*x[2,2]");
        assert_eq!(parse::<BigRational>(&to_text(&f, &d), &d).unwrap(), f);
    }

    #[test]
    fn powers_constants_and_fractions() {
        let d = dims("2x2x2");
        let p: P = parse("-x[1,1,1]^2 + 3/2 - 2*x[2,2,2]*x[1,1,1]", &d).unwrap();
        assert_eq!(p.coefficient(&Monomial::from_vars([0, 0])), q(-1, 1));
        assert_eq!(p.coefficient(&Monomial::one()), q(3, 2));
        assert_eq!(p.coefficient(&Monomial::from_vars([0, 7])), q(-2, 1));
        assert_eq!(to_text(&P::zero(), &d), "0");
        assert!(parse::<BigRational>("0", &d).unwrap().is_zero());
    }

    #[test]
    fn rejects_garbage() {
        let d = dims("2x2");
        for bad in ["", "x[3,1]", "x[1,1", "1 +", "x[1,1]^a", "y[1,1]", "2**x[1,1]"] {
            assert!(parse::<BigRational>(bad, &d).is_err(), "{bad:?}");
        }
    }

    proptest! {
        #[test]
        fn round_trip(ts in prop::collection::vec((prop::collection::vec(0u32..12, 0..4), -5i64..6, 1i64..4), 0..6)) {
            let d = dims("2x3x2");
            let p = P::from_terms(ts.into_iter().map(|(vs, n, den)| (Monomial::from_vars(vs), q(n, den))));
            let back: P = parse(&to_text(&p, &d), &d).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
