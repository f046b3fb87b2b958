//! Exact integer polynomial arithmetic and root-location certificates.
//!
//! The one nontrivial service here is [`is_real_rooted_in_weil_interval`]: decide,
//! with no floating point, whether every complex root of an integer polynomial is
//! real and lies in the closed interval `[-2*sqrt(q), 2*sqrt(q)]`. Signs at the
//! irrational endpoints are computed by splitting `p` into even and odd parts,
//! `p(2*sqrt(q)) = U + V*2*sqrt(q)` with `U, V` integers, and comparing `U^2`
//! against `4q*V^2`.

use crate::Int;
use num_traits::{One, Signed, Zero};

/// Dense integer polynomial, coefficients in ascending degree order.
///
/// Invariant: the coefficient vector carries no trailing zeros (the zero
/// polynomial is the empty vector).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<Int>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn from_ascending(mut coeffs: Vec<Int>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_descending(coeffs: &[Int]) -> Self {
        let mut v: Vec<Int> = coeffs.to_vec();
        v.reverse();
        Self::from_ascending(v)
    }

    pub fn from_descending_i64(coeffs: &[i64]) -> Self {
        Self::from_descending(&coeffs.iter().map(|&c| Int::from(c)).collect::<Vec<_>>())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Int> {
        self.coeffs.last()
    }

    pub fn ascending(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn descending(&self) -> Vec<Int> {
        let mut v = self.coeffs.clone();
        v.reverse();
        v
    }

    pub fn coeff(&self, power: usize) -> Int {
        self.coeffs.get(power).cloned().unwrap_or_else(Int::zero)
    }

    pub fn eval(&self, x: &Int) -> Int {
        let mut acc = Int::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        IntPoly::from_ascending(out)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![Int::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::from_ascending(out)
    }

    pub fn scale(&self, k: &Int) -> IntPoly {
        if k.is_zero() {
            return IntPoly::zero();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Multiply by `T^k`.
    pub fn shift(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![Int::zero(); k];
        out.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs: out }
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Int::from(i))
            .collect();
        IntPoly::from_ascending(out)
    }

    /// Nonnegative gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self) -> Int {
        let mut g = Int::zero();
        for c in &self.coeffs {
            g = num_integer::Integer::gcd(&g, c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide by the content, preserving the sign of the leading coefficient.
    pub fn primitive(&self) -> IntPoly {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| c / &g).collect(),
        }
    }

    /// Exact division; `None` when `d` does not divide `self` in `Z[T]`.
    pub fn exact_div(&self, d: &IntPoly) -> Option<IntPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let (dn, dd) = (self.degree()?, d.degree()?);
        if dn < dd {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Int::zero(); dn - dd + 1];
        let lead = d.leading().unwrap();
        for k in (0..=dn - dd).rev() {
            let top = std::mem::take(&mut rem[k + dd]);
            if top.is_zero() {
                continue;
            }
            let (q, r) = num_integer::Integer::div_rem(&top, lead);
            if !r.is_zero() {
                return None;
            }
            for (i, c) in d.coeffs.iter().enumerate().take(dd) {
                rem[k + i] -= &q * c;
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(IntPoly::from_ascending(quot))
    }

    /// Remainder of `self` by `g` scaled by a positive power of `|lc(g)|`.
    ///
    /// Positive scaling keeps the sign structure intact, so the result can be
    /// used directly in Sturm chains and polynomial gcds.
    fn positive_scaled_rem(&self, g: &IntPoly) -> IntPoly {
        let dg = g.degree().expect("nonzero divisor");
        let lead = g.leading().unwrap().clone();
        let lead_abs = lead.abs();
        let sign = if lead.is_negative() {
            -Int::one()
        } else {
            Int::one()
        };
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dg {
                break;
            }
            let factor = r.leading().unwrap() * &sign;
            r = r.scale(&lead_abs).sub(&g.scale(&factor).shift(dr - dg));
            debug_assert!(r.degree().map_or(true, |d| d < dr));
        }
        r
    }

    /// Polynomial gcd in `Z[T]`, primitive with positive leading coefficient.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.is_zero() {
            return b.positive_lc();
        }
        if b.is_zero() {
            return a.positive_lc();
        }
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = a.positive_scaled_rem(&b);
            if r.is_zero() {
                return b.positive_lc();
            }
            a = b;
            b = r.primitive();
        }
    }

    fn positive_lc(&self) -> IntPoly {
        match self.leading() {
            Some(l) if l.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    /// `self / gcd(self, self')`: same roots, all simple.
    pub fn squarefree_part(&self) -> IntPoly {
        if self.degree().unwrap_or(0) <= 1 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.clone();
        }
        self.exact_div(&g)
            .expect("gcd divides the polynomial")
            .primitive()
    }
}

/// Sign of `p(s * 2*sqrt(q))` for `s = +1` or `-1`, computed exactly.
///
/// Writing `x = s*2*sqrt(q)` we have `x^2 = 4q`, so `p(x) = U + s*V*2*sqrt(q)`
/// with `U = sum of even-degree terms` and `V` from the odd part. The sign is
/// settled by comparing `U^2` with `4q * V^2`.
pub fn sign_at_two_sqrt(p: &IntPoly, q: u64, s: i8) -> i8 {
    let four_q = Int::from(4u64 * q);
    let mut u = Int::zero();
    let mut v = Int::zero();
    // Horner in x^2 = 4q over the two parity classes.
    let mut pow = Int::one();
    for (i, c) in p.ascending().iter().enumerate() {
        if i >= 2 && i % 2 == 0 {
            pow *= &four_q;
        }
        if i % 2 == 0 {
            u += c * &pow;
        } else {
            v += c * &pow;
        }
    }
    if s < 0 {
        v = -v;
    }
    let su = sign_of(&u);
    let sv = sign_of(&v);
    match (su, sv) {
        (0, 0) => 0,
        (0, _) => sv,
        (_, 0) => su,
        _ if su == sv => su,
        _ => {
            // Opposite signs: compare |U| with 2*sqrt(q)*|V| exactly.
            let lhs = &u * &u;
            let rhs = &four_q * &v * &v;
            match lhs.cmp(&rhs) {
                std::cmp::Ordering::Greater => su,
                std::cmp::Ordering::Less => sv,
                std::cmp::Ordering::Equal => 0,
            }
        }
    }
}

fn sign_of(x: &Int) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_negative() {
        -1
    } else {
        1
    }
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sturm_chain(h: &IntPoly) -> Vec<IntPoly> {
    let mut chain = vec![h.clone(), h.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        if chain[n - 1].degree() == Some(0) {
            break;
        }
        let r = chain[n - 2].positive_scaled_rem(&chain[n - 1]).neg();
        if r.is_zero() {
            break;
        }
        chain.push(r.primitive());
    }
    chain
}

/// Does every complex root of `p` lie in the closed real interval
/// `[-2*sqrt(q), 2*sqrt(q)]`? Multiplicities are allowed.
///
/// Strategy: take the squarefree part `h`, peel off roots at the endpoints
/// (the factor `T^2 - 4q`, or `T -+ 2*sqrt(q)` when `4q` is a perfect square),
/// then require the Sturm variation drop across the interval to equal `deg h`.
pub fn is_real_rooted_in_weil_interval(p: &IntPoly, q: u64) -> bool {
    assert!(q >= 2, "field size must be at least 2");
    let deg = match p.degree() {
        None => return false,
        Some(d) => d,
    };
    if deg == 0 {
        return true;
    }
    let mut h = p.squarefree_part();
    let four_q = 4 * q;
    let root = (four_q as f64).sqrt() as u64;
    let exact_sqrt = (root.saturating_sub(1)..=root + 1).find(|r| r * r == four_q);
    if let Some(r) = exact_sqrt {
        for e in [Int::from(r), -Int::from(r)] {
            let lin = IntPoly::from_ascending(vec![-e, Int::one()]);
            if let Some(quot) = h.exact_div(&lin) {
                h = quot;
            }
        }
    } else {
        let min_poly = IntPoly::from_ascending(vec![-Int::from(four_q), Int::zero(), Int::one()]);
        if let Some(quot) = h.exact_div(&min_poly) {
            h = quot;
        }
    }
    let d = match h.degree() {
        None => return false,
        Some(0) => return true,
        Some(d) => d,
    };
    let chain = sturm_chain(&h);
    let v_lo = variations(chain.iter().map(|f| sign_at_two_sqrt(f, q, -1)));
    let v_hi = variations(chain.iter().map(|f| sign_at_two_sqrt(f, q, 1)));
    v_lo >= v_hi && v_lo - v_hi == d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(desc: &[i64]) -> IntPoly {
        IntPoly::from_descending_i64(desc)
    }

    #[test]
    fn eval_and_arith() {
        let p = poly(&[1, 2, -1]); // T^2 + 2T - 1
        assert_eq!(p.eval(&Int::from(3)), Int::from(14));
        assert_eq!(p.mul(&poly(&[1, 0])).degree(), Some(3));
        assert_eq!(p.derivative(), poly(&[2, 2]));
    }

    #[test]
    fn exact_division() {
        let a = poly(&[1, -1]); // T - 1
        let b = poly(&[1, 2]); // T + 2
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&a).unwrap(), b);
        assert_eq!(prod.exact_div(&poly(&[1, 5])), None);
    }

    #[test]
    fn squarefree_strips_multiplicity() {
        let sq = poly(&[1, 2, 1]); // (T+1)^2
        assert_eq!(sq.squarefree_part(), poly(&[1, 1]));
    }

    #[test]
    fn sign_at_endpoints() {
        // T^2 - 8 vanishes exactly at +-2*sqrt(2).
        let p = poly(&[1, 0, -8]);
        assert_eq!(sign_at_two_sqrt(&p, 2, 1), 0);
        assert_eq!(sign_at_two_sqrt(&p, 2, -1), 0);
        // T - 3 is negative at 2*sqrt(2) ~ 2.828.
        assert_eq!(sign_at_two_sqrt(&poly(&[1, -3]), 2, 1), -1);
        assert_eq!(sign_at_two_sqrt(&poly(&[1, -2]), 2, 1), 1);
        assert_eq!(sign_at_two_sqrt(&poly(&[1, 0]), 2, -1), -1);
    }

    #[test]
    fn interval_certificate_basic() {
        // Roots 0 and -2: inside.
        assert!(is_real_rooted_in_weil_interval(&poly(&[1, 2, 0]), 2));
        // Roots +-2*sqrt(2): on the boundary, still inside the closed interval.
        assert!(is_real_rooted_in_weil_interval(&poly(&[1, 0, -8]), 2));
        // Complex roots.
        assert!(!is_real_rooted_in_weil_interval(&poly(&[1, 0, 1]), 2));
        // Real root 3 outside the interval.
        assert!(!is_real_rooted_in_weil_interval(&poly(&[1, -3]), 2));
        // Repeated root inside.
        assert!(is_real_rooted_in_weil_interval(&poly(&[1, -4, 4]), 2));
        // T^2 - 9: root 3 outside.
        assert!(!is_real_rooted_in_weil_interval(&poly(&[1, 0, -9]), 2));
    }

    #[test]
    fn interval_certificate_products() {
        // Product of linear factors with roots in {-2, -1, 0, 1, 2}.
        let mut p = poly(&[1]);
        for r in [-2i64, -1, 0, 1, 2] {
            p = p.mul(&poly(&[1, -r]));
        }
        assert!(is_real_rooted_in_weil_interval(&p, 2));
        // Slip one root out of range.
        let bad = p.mul(&poly(&[1, -3]));
        assert!(!is_real_rooted_in_weil_interval(&bad, 2));
        // Multiply by an irreducible quadratic: no longer real-rooted.
        let complex = p.mul(&poly(&[1, 1, 1]));
        assert!(!is_real_rooted_in_weil_interval(&complex, 2));
    }

    #[test]
    fn interval_respects_field_size() {
        // Root 3 is inside [-2*sqrt(3), 2*sqrt(3)] ~ [-3.46, 3.46].
        assert!(is_real_rooted_in_weil_interval(&poly(&[1, -3]), 3));
        // q = 4: 2*sqrt(q) = 4 is rational; T - 4 sits on the endpoint.
        assert!(is_real_rooted_in_weil_interval(&poly(&[1, -4]), 4));
        assert!(!is_real_rooted_in_weil_interval(&poly(&[1, -5]), 4));
    }
}
