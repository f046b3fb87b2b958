//! Real Weil polynomials over F_q: expansion to Frobenius data, point counts,
//! group orders, and enumeration under prescribed power sums and value filters.
//!
//! A real Weil polynomial of genus `g` is a monic integer polynomial of degree
//! `g` whose roots are all real and lie in `[-2*sqrt(q), 2*sqrt(q)]`. Its
//! expansion `L(T) = T^g * h(T + q/T)` is the degree-`2g` characteristic
//! polynomial of Frobenius; the power sums `p_n` of `L` are the Frobenius
//! traces over F_{q^n}, and `N_n = q^n + 1 - p_n` are curve point counts.
//!
//! Enumeration walks coefficients top-down. Fixing the first `k` coefficients
//! fixes the degree-`k` normalized derivative, which must itself be real-rooted
//! in the interval (Rolle), and bounds the next coefficient through the Newton
//! identity together with the power-sum bound `|s_k| <= g*(2*sqrt(q))^k`.

use crate::poly::{is_real_rooted_in_weil_interval, IntPoly};
use crate::Int;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeilError {
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("coefficient list of length {0} does not match genus {1}")]
    WrongLength(usize, usize),
    #[error("genus must be positive")]
    GenusZero,
    #[error("roots are not all real in [-2*sqrt(q), 2*sqrt(q)]")]
    RootsOutsideInterval,
    #[error("point count N_{0} is negative")]
    NegativeCount(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProfileError {
    #[error("place count a_{0} is not an integer")]
    NonIntegralPlaceCount(usize),
    #[error("place count a_{0} is negative")]
    NegativePlaceCount(usize),
}

/// Monic integer polynomial of degree `g` with all roots in `[-2*sqrt(q), 2*sqrt(q)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RealWeilPolynomial {
    /// Degree-descending coefficients, leading 1 included.
    coeffs: Vec<Int>,
    genus: usize,
    q: u64,
}

impl RealWeilPolynomial {
    pub fn new(coeffs_desc: Vec<Int>, q: u64) -> Result<Self, WeilError> {
        if coeffs_desc.len() < 2 {
            return Err(WeilError::GenusZero);
        }
        if coeffs_desc[0] != Int::from(1) {
            return Err(WeilError::NotMonic);
        }
        let genus = coeffs_desc.len() - 1;
        let p = IntPoly::from_descending(&coeffs_desc);
        if !is_real_rooted_in_weil_interval(&p, q) {
            return Err(WeilError::RootsOutsideInterval);
        }
        Ok(RealWeilPolynomial {
            coeffs: coeffs_desc,
            genus,
            q,
        })
    }

    pub fn from_i64(coeffs_desc: &[i64], q: u64) -> Result<Self, WeilError> {
        Self::new(coeffs_desc.iter().map(|&c| Int::from(c)).collect(), q)
    }

    /// Constructor for coefficients already certified by the enumeration path.
    fn from_validated(coeffs_desc: Vec<Int>, q: u64) -> Self {
        let genus = coeffs_desc.len() - 1;
        RealWeilPolynomial {
            coeffs: coeffs_desc,
            genus,
            q,
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Degree-descending coefficients, leading 1 included.
    pub fn coefficients(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn coefficients_i64(&self) -> Vec<i64> {
        self.coeffs
            .iter()
            .map(|c| c.to_i64().expect("coefficient fits in i64"))
            .collect()
    }

    pub fn as_poly(&self) -> IntPoly {
        IntPoly::from_descending(&self.coeffs)
    }

    /// Product of two real Weil polynomials over the same field (isogeny product).
    pub fn product(&self, other: &RealWeilPolynomial) -> RealWeilPolynomial {
        assert_eq!(self.q, other.q);
        let p = self.as_poly().mul(&other.as_poly());
        RealWeilPolynomial::from_validated(p.descending(), self.q)
    }
}

impl std::fmt::Display for RealWeilPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Frobenius data attached to a real Weil polynomial: the full degree-`2g`
/// characteristic polynomial and its power sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusData {
    /// Degree-descending coefficients of `L(T)`, length `2g + 1`.
    pub full_coeffs: Vec<Int>,
    /// Power sums `p_1..p_n` of the Frobenius eigenvalues.
    pub power_sums: Vec<Int>,
    pub genus: usize,
    pub q: u64,
}

impl FrobeniusData {
    /// Power sums `p_1..p_n`, extending past the stored horizon if needed.
    pub fn power_sums_to(&self, n: usize) -> Vec<Int> {
        if n <= self.power_sums.len() {
            return self.power_sums[..n].to_vec();
        }
        newton_power_sums(&self.full_coeffs, n)
    }

    /// `#A(F_{q^n})`: the product of `1 - alpha^n` over all Frobenius eigenvalues.
    pub fn group_order(&self, n: usize) -> Int {
        group_order_from_full(&self.full_coeffs, self.q, n)
    }

    /// Check the functional equation `T^{2g} L(q/T) = q^g L(T)` coefficientwise.
    pub fn satisfies_functional_equation(&self) -> bool {
        let two_g = 2 * self.genus;
        let q = Int::from(self.q);
        for j in 0..=two_g {
            // a_{2g-j} * q^j = a_j * q^g  <=>  a_j = a_{2g-j} * q^{j-g} for j >= g.
            let lhs = &self.full_coeffs[two_g - j] * q.pow(j as u32);
            let rhs = &self.full_coeffs[j] * q.pow(self.genus as u32);
            if lhs != rhs {
                return false;
            }
        }
        true
    }
}

/// Expand a real Weil polynomial to its Frobenius data:
/// `L(T) = sum_i c_i T^i (T^2 + q)^{g-i}` for `h = sum_i c_i T^{g-i}`.
pub fn expand_real_weil(h: &RealWeilPolynomial) -> FrobeniusData {
    let g = h.genus();
    let q = Int::from(h.q());
    let base = IntPoly::from_ascending(vec![q, Int::zero(), Int::from(1)]); // T^2 + q
    let mut acc = IntPoly::zero();
    let mut pow = IntPoly::from_ascending(vec![Int::from(1)]);
    // Accumulate from i = g down to 0 so `pow` runs through (T^2+q)^0..(T^2+q)^g.
    for i in (0..=g).rev() {
        let c = h.coefficients()[i].clone(); // coefficient of T^{g-i}
        acc = acc.add(&pow.shift(i).scale(&c));
        if i > 0 {
            pow = pow.mul(&base);
        }
    }
    let full = acc.descending();
    debug_assert_eq!(full.len(), 2 * g + 1);
    let power_sums = newton_power_sums(&full, 2 * g);
    FrobeniusData {
        full_coeffs: full,
        power_sums,
        genus: g,
        q: h.q(),
    }
}

/// Power sums `p_1..p_n` of a monic polynomial given by degree-descending
/// coefficients, via the Newton identities (recurrence past the degree).
pub fn newton_power_sums(coeffs_desc: &[Int], n: usize) -> Vec<Int> {
    let deg = coeffs_desc.len() - 1;
    let mut p: Vec<Int> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut acc = Int::zero();
        for i in 1..=(k - 1).min(deg) {
            acc += &coeffs_desc[i] * &p[k - 1 - i];
        }
        if k <= deg {
            acc += Int::from(k as i64) * &coeffs_desc[k];
        }
        p.push(-acc);
    }
    p
}

fn group_order_from_full(full_desc: &[Int], _q: u64, n: usize) -> Int {
    let two_g = full_desc.len() - 1;
    // Coefficients of the polynomial whose roots are the n-th powers of the
    // eigenvalues, reconstructed from power sums p_n, p_2n, ....
    let sums = newton_power_sums(full_desc, two_g * n);
    let mut e: Vec<Int> = vec![Int::from(1)];
    for k in 1..=two_g {
        let mut acc = Int::zero();
        for i in 1..=k {
            acc += &e[k - i] * &sums[i * n - 1];
        }
        let (c, r) = num_integer::Integer::div_rem(&(-acc), &Int::from(k as i64));
        debug_assert!(r.is_zero(), "base-change coefficients are integral");
        e.push(c);
    }
    // L_n(1) = sum of coefficients.
    e.into_iter().sum()
}

/// `#A(F_{q^n})` straight from the real Weil polynomial.
pub fn group_order(h: &RealWeilPolynomial, n: usize) -> Int {
    match n {
        1 => h.as_poly().eval(&Int::from(h.q() + 1)),
        _ => expand_real_weil(h).group_order(n),
    }
}

/// Point counts `N_n = q^n + 1 - p_n` for `n = 1..=n_max`.
pub fn point_counts(h: &RealWeilPolynomial, n_max: usize) -> Result<PointCountProfile, WeilError> {
    let data = expand_real_weil(h);
    let sums = data.power_sums_to(n_max);
    let mut counts = Vec::with_capacity(n_max);
    for (i, p) in sums.iter().enumerate() {
        let n = i + 1;
        let count: Int = Int::from(h.q()).pow(n as u32) + 1 - p;
        if count.is_negative() {
            return Err(WeilError::NegativeCount(n));
        }
        counts.push(Some(count.to_i64().expect("point count fits in i64")));
    }
    Ok(PointCountProfile {
        q: h.q(),
        genus: h.genus(),
        counts,
    })
}

/// Sequence of point counts `N_n`, with `None` marking an omitted entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCountProfile {
    pub q: u64,
    pub genus: usize,
    pub counts: Vec<Option<i64>>,
}

impl PointCountProfile {
    /// Derived place counts `a_n = (1/n) * sum_{m | n} mu(n/m) N_m`.
    ///
    /// An entry is `None` when some required `N_m` is omitted. Concrete entries
    /// must be nonnegative integers; anything else flags an inconsistent profile.
    pub fn place_counts(&self) -> Result<Vec<Option<i64>>, ProfileError> {
        let n_max = self.counts.len();
        let mut out = Vec::with_capacity(n_max);
        'outer: for n in 1..=n_max {
            let mut total: i64 = 0;
            for m in 1..=n {
                if n % m != 0 {
                    continue;
                }
                let mu = moebius(n / m);
                if mu == 0 {
                    continue;
                }
                match self.counts[m - 1] {
                    Some(v) => total += mu * v,
                    None => {
                        out.push(None);
                        continue 'outer;
                    }
                }
            }
            if total % (n as i64) != 0 {
                return Err(ProfileError::NonIntegralPlaceCount(n));
            }
            let a = total / n as i64;
            if a < 0 {
                return Err(ProfileError::NegativePlaceCount(n));
            }
            out.push(Some(a));
        }
        Ok(out)
    }

    /// Do the counts of `h` agree with every concrete entry?
    pub fn consistent_with(&self, h: &RealWeilPolynomial) -> bool {
        match point_counts(h, self.counts.len()) {
            Err(_) => false,
            Ok(full) => self
                .counts
                .iter()
                .zip(full.counts.iter())
                .all(|(mine, theirs)| mine.is_none() || mine == theirs),
        }
    }
}

pub fn moebius(n: usize) -> i64 {
    let mut n = n;
    let mut factors = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            factors += 1;
        }
        p += 1;
    }
    if n > 1 {
        factors += 1;
    }
    if factors % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Value constraints applied to enumerated real Weil polynomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ValueFilters {
    /// `#A(F_{q^n})` must equal the given value; `n` is the base-change degree.
    pub order_exact: Vec<(u32, i64)>,
    /// `#A(F_{q^n})` must be divisible by the given modulus.
    pub order_divisible: Vec<(u32, i64)>,
    /// The trace `p_i` must lie in the given set (`i` is 1-based).
    pub trace_in: Vec<(u32, Vec<i64>)>,
}

impl ValueFilters {
    pub fn is_empty(&self) -> bool {
        self.order_exact.is_empty() && self.order_divisible.is_empty() && self.trace_in.is_empty()
    }

    fn exact_l1(&self) -> Option<i64> {
        self.order_exact
            .iter()
            .find(|(n, _)| *n == 1)
            .map(|&(_, v)| v)
    }
}

/// Why an enumeration produced nothing (beyond simple exhaustion).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShortCircuit {
    /// A prescribed power sum violates the Weil bound `p_i^2 <= 4 g^2 q^i`.
    WeilBoundViolated { index: usize },
    /// The Newton identities force a non-integral coefficient.
    NonIntegralCoefficient { index: usize },
    /// A prescribed trace conflicts with a trace membership filter.
    TraceFilterConflict { index: usize },
}

/// Outcome of `enumerate_real_weil`.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub polys: Vec<RealWeilPolynomial>,
    pub short_circuit: Option<ShortCircuit>,
}

/// Outcome of `exists_real_weil`.
#[derive(Clone, Debug)]
pub enum Existence {
    Witness(RealWeilPolynomial),
    Empty(Option<ShortCircuit>),
}

impl Existence {
    pub fn found(&self) -> bool {
        matches!(self, Existence::Witness(_))
    }
}

/// Dickson coefficient `m/(m-i) * C(m-i, i)`, an integer.
fn dickson_coeff(m: usize, i: usize) -> i128 {
    binomial(m - i, i) + if i > 0 { binomial(m - i - 1, i - 1) } else { 0 }
}

fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let mut acc: i128 = 1;
    for j in 0..k.min(n - k) {
        acc = acc * (n - j) as i128 / (j + 1) as i128;
    }
    acc
}

/// Convert prescribed eigenvalue power sums `p_1..p_k` into prescribed power
/// sums `s_1..s_k` of the real Weil polynomial itself, using the triangular
/// relation `p_m = sum_i dickson(m,i) (-q)^i s_{m-2i}` with `s_0 = g`.
fn eigen_sums_to_real_sums(p: &[i64], genus: usize, q: u64) -> Vec<i64> {
    let mut s: Vec<i128> = Vec::with_capacity(p.len());
    for m in 1..=p.len() {
        let mut acc = p[m - 1] as i128;
        for i in 1..=m / 2 {
            let coeff = dickson_coeff(m, i) * (-(q as i128)).pow(i as u32);
            let lower = if m == 2 * i {
                genus as i128
            } else {
                s[m - 2 * i - 1]
            };
            acc -= coeff * lower;
        }
        s.push(acc);
    }
    s.into_iter().map(|v| v as i64).collect()
}

/// Forward direction: `p_m` from the real-polynomial power sums.
fn real_sums_to_eigen_sum(s: &[i64], m: usize, genus: usize, q: u64) -> i64 {
    let mut acc: i128 = 0;
    for i in 0..=m / 2 {
        let coeff = dickson_coeff(m, i) * (-(q as i128)).pow(i as u32);
        let term = if m == 2 * i {
            genus as i128
        } else {
            s[m - 2 * i - 1] as i128
        };
        acc += coeff * term;
    }
    acc as i64
}

/// `floor(sqrt(x))` for nonnegative `x`.
fn isqrt(x: i128) -> i128 {
    if x < 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt() as i128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// `floor(v * sqrt(f))` for `f >= 0`, exact.
fn floor_mul_sqrt(v: i128, f: i128) -> i128 {
    if v >= 0 {
        isqrt(v * v * f)
    } else {
        let s = isqrt(v * v * f);
        // ceil(|v| sqrt f) = s unless exact.
        if s * s == v * v * f {
            -s
        } else {
            -(s + 1)
        }
    }
}

struct SearchCtx<'a> {
    genus: usize,
    q: u64,
    /// Prescribed eigenvalue power sums (may be longer than the genus).
    prescribed: &'a [i64],
    filters: &'a ValueFilters,
    /// Power-sum bound `|s_k| <= floor(g * (2 sqrt q)^k)`.
    s_bound: Vec<i64>,
}

impl SearchCtx<'_> {
    /// Coefficient prefix forced by the prescription, or the short-circuit reason.
    fn forced_prefix(&self) -> Result<(Vec<i64>, Vec<i64>), ShortCircuit> {
        for (i, &p) in self.prescribed.iter().enumerate() {
            let idx = i + 1;
            let bound = 4 * (self.genus as i128).pow(2) * (self.q as i128).pow(idx as u32);
            if (p as i128) * (p as i128) > bound {
                return Err(ShortCircuit::WeilBoundViolated { index: idx });
            }
        }
        for (i, set) in &self.filters.trace_in {
            let i = *i as usize;
            if i >= 1 && i <= self.prescribed.len() && !set.contains(&self.prescribed[i - 1]) {
                return Err(ShortCircuit::TraceFilterConflict { index: i });
            }
        }
        let k = self.prescribed.len().min(self.genus);
        let s_all = eigen_sums_to_real_sums(self.prescribed, self.genus, self.q);
        let mut coeffs: Vec<i64> = Vec::with_capacity(k);
        let mut s: Vec<i64> = Vec::with_capacity(k);
        for j in 1..=k {
            let sj = s_all[j - 1];
            let mut acc = sj as i128;
            for i in 1..j {
                acc += coeffs[i - 1] as i128 * s[j - 1 - i] as i128;
            }
            if acc % j as i128 != 0 {
                return Err(ShortCircuit::NonIntegralCoefficient { index: j });
            }
            coeffs.push((-acc / j as i128) as i64);
            s.push(sj);
        }
        Ok((coeffs, s))
    }

    /// Degree-`k` normalized derivative of the partial polynomial: coefficients
    /// `C(g-i, k-i) * c_i` for `i = 0..=k` (with `c_0 = 1`).
    fn partial_poly(&self, coeffs: &[i64]) -> IntPoly {
        let k = coeffs.len();
        let g = self.genus;
        let mut desc: Vec<Int> = Vec::with_capacity(k + 1);
        desc.push(Int::from(binomial(g, k)));
        for (i, &c) in coeffs.iter().enumerate() {
            desc.push(Int::from(binomial(g - i - 1, k - i - 1) * c as i128));
        }
        IntPoly::from_descending(&desc)
    }

    /// Evaluate the degree-`k` partial polynomial with the last coefficient set
    /// to zero at `2 sqrt(q)`, returned as the exact pair `(U, V)` with value
    /// `U + V * 2 sqrt(q)`. At `-2 sqrt(q)` the value is `U - V * 2 sqrt(q)`.
    fn partial_split_eval(&self, coeffs: &[i64]) -> (i128, i128) {
        let k = coeffs.len() + 1;
        let g = self.genus;
        let f = 4 * self.q as i128;
        let mut u: i128 = 0;
        let mut v: i128 = 0;
        // Descending coefficients: index i has power k - i; c_k itself is 0.
        for i in 0..k {
            let coeff = if i == 0 {
                binomial(g, k)
            } else {
                binomial(g - i, k - i) * coeffs[i - 1] as i128
            };
            let power = k - i;
            if power % 2 == 0 {
                u += coeff * f.pow((power / 2) as u32);
            } else {
                v += coeff * f.pow(((power - 1) / 2) as u32);
            }
        }
        (u, v)
    }

    fn leaf_accepts(&self, coeffs: &[i64], s: &mut Vec<i64>) -> bool {
        let g = self.genus;
        // Extend power sums far enough for trailing prescriptions and trace filters.
        let mut horizon = self.prescribed.len();
        for (i, _) in &self.filters.trace_in {
            horizon = horizon.max(*i as usize);
        }
        // At the leaf `s` holds s_1..s_g, so every extension index exceeds the
        // degree and the Newton identity is a plain recurrence.
        while s.len() < horizon {
            let m = s.len() + 1;
            let mut acc: i128 = 0;
            for i in 1..=g {
                acc += coeffs[i - 1] as i128 * s[m - 1 - i] as i128;
            }
            s.push((-acc) as i64);
        }
        for m in g + 1..=self.prescribed.len() {
            if real_sums_to_eigen_sum(s, m, g, self.q) != self.prescribed[m - 1] {
                return false;
            }
        }
        for (i, set) in &self.filters.trace_in {
            let i = *i as usize;
            if !set.contains(&real_sums_to_eigen_sum(s, i, g, self.q)) {
                return false;
            }
        }
        if !self.filters.order_exact.is_empty() || !self.filters.order_divisible.is_empty() {
            let h = self.make_poly(coeffs);
            for &(n, v) in &self.filters.order_exact {
                if order_value(&h, self.q, n as usize) != Int::from(v) {
                    return false;
                }
            }
            for &(n, m) in &self.filters.order_divisible {
                let val = order_value(&h, self.q, n as usize);
                if !(val % Int::from(m)).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    fn make_poly(&self, coeffs: &[i64]) -> IntPoly {
        let mut desc = vec![1i64];
        desc.extend_from_slice(coeffs);
        IntPoly::from_descending_i64(&desc)
    }
}

fn order_value(h: &IntPoly, q: u64, n: usize) -> Int {
    let g = h.degree().unwrap_or(0);
    match n {
        1 => h.eval(&Int::from(q + 1)),
        2 => {
            // #A(F_{q^2}) = L(1) * L(-1) = h(q+1) * (-1)^g * h(-(q+1)).
            let v = h.eval(&Int::from(q + 1)) * h.eval(&(-Int::from(q + 1)));
            if g % 2 == 1 {
                -v
            } else {
                v
            }
        }
        _ => {
            let full = expand_from_poly(h, q);
            group_order_from_full(&full, q, n)
        }
    }
}

fn expand_from_poly(h: &IntPoly, q: u64) -> Vec<Int> {
    let g = h.degree().expect("nonzero");
    let base = IntPoly::from_ascending(vec![Int::from(q), Int::zero(), Int::from(1)]);
    let mut acc = IntPoly::zero();
    let mut pow = IntPoly::from_ascending(vec![Int::from(1)]);
    for i in (0..=g).rev() {
        let c = h.coeff(g - i);
        acc = acc.add(&pow.shift(i).scale(&c));
        if i > 0 {
            pow = pow.mul(&base);
        }
    }
    acc.descending()
}

fn search(
    ctx: &SearchCtx<'_>,
    coeffs: &mut Vec<i64>,
    s: &mut Vec<i64>,
    on_found: &mut dyn FnMut(RealWeilPolynomial) -> bool,
) -> bool {
    let g = ctx.genus;
    let k = coeffs.len();
    if k == g {
        let mut s_ext = s.clone();
        if ctx.leaf_accepts(coeffs, &mut s_ext) {
            let mut desc = vec![Int::from(1)];
            desc.extend(coeffs.iter().map(|&c| Int::from(c)));
            if !on_found(RealWeilPolynomial::from_validated(desc, ctx.q)) {
                return false;
            }
        }
        return true;
    }
    let next = k + 1;
    // Newton: s_next + sum_{i<next} c_i s_{next-i} + next * c_next = 0.
    let mut partial: i128 = 0;
    for i in 1..next {
        partial += coeffs[i - 1] as i128 * s[next - 1 - i] as i128;
    }
    // Fast path: an exact #A(F_q) filter pins the constant coefficient, since
    // #A(F_q) = h(q+1) is linear in it.
    if next == g && ctx.prescribed.len() < g {
        if let Some(v) = ctx.filters.exact_l1() {
            let x = (ctx.q + 1) as i128;
            let mut rest: i128 = x.pow(g as u32);
            for (i, &c) in coeffs.iter().enumerate() {
                rest += c as i128 * x.pow((g - i - 1) as u32);
            }
            let c_last = v as i128 - rest;
            let Ok(c_last) = i64::try_from(c_last) else {
                return true;
            };
            let s_last = -(partial + next as i128 * c_last as i128);
            let Ok(s_last) = i64::try_from(s_last) else {
                return true;
            };
            coeffs.push(c_last);
            s.push(s_last);
            let keep = if is_real_rooted_in_weil_interval(&ctx.partial_poly(coeffs), ctx.q) {
                search(ctx, coeffs, s, on_found)
            } else {
                true
            };
            coeffs.pop();
            s.pop();
            return keep;
        }
    }
    let bound = ctx.s_bound[next - 1] as i128;
    // c_next ranges over the integers with |s_next| <= bound.
    let mut lo = div_ceil(-bound - partial, next as i128);
    let mut hi = div_floor(bound - partial, next as i128);
    // Even power sums of a real-rooted polynomial are nonnegative, and
    // Cauchy-Schwarz gives s_{2m} >= s_m^2 / g.
    if next % 2 == 0 {
        let half = s[next / 2 - 1] as i128;
        let s_min = div_ceil(half * half, g as i128);
        hi = hi.min(div_floor(-partial - s_min, next as i128));
    }
    // Endpoint signs of the partial polynomial are linear in c_next: with
    // positive leading coefficient, roots in the interval force P(E) >= 0 and
    // (-1)^k P(-E) >= 0.
    let f = 4 * ctx.q as i128;
    let (u, v) = ctx.partial_split_eval(coeffs);
    lo = lo.max(-u - floor_mul_sqrt(v, f));
    if next % 2 == 0 {
        lo = lo.max(-u - floor_mul_sqrt(-v, f));
    } else {
        hi = hi.min(-u + floor_mul_sqrt(v, f));
    }
    // The admissible set is an interval: the partial polynomial's derivative
    // is a positive multiple of the previous level's polynomial, so validity
    // is an intersection of conditions linear in c_next. Stop scanning at the
    // first failure after a success.
    let mut seen_valid = false;
    let mut c = lo;
    while c <= hi {
        coeffs.push(c as i64);
        s.push((-(partial + next as i128 * c)) as i64);
        let valid = is_real_rooted_in_weil_interval(&ctx.partial_poly(coeffs), ctx.q);
        let keep = if valid {
            seen_valid = true;
            search(ctx, coeffs, s, on_found)
        } else {
            true
        };
        coeffs.pop();
        s.pop();
        if !keep {
            return false;
        }
        if seen_valid && !valid {
            break;
        }
        c += 1;
    }
    true
}

fn div_floor(a: i128, b: i128) -> i128 {
    num_integer::Integer::div_floor(&a, &b)
}

fn div_ceil(a: i128, b: i128) -> i128 {
    num_integer::Integer::div_ceil(&a, &b)
}

fn make_ctx<'a>(
    genus: usize,
    q: u64,
    prescribed: &'a [i64],
    filters: &'a ValueFilters,
) -> SearchCtx<'a> {
    let mut s_bound = Vec::with_capacity(genus);
    for k in 1..=genus {
        let sq = (genus as i128).pow(2) * (4 * q as i128).pow(k as u32);
        s_bound.push(isqrt(sq) as i64);
    }
    SearchCtx {
        genus,
        q,
        prescribed,
        filters,
        s_bound,
    }
}

/// Enumerate all real Weil polynomials of the given genus over F_q whose
/// eigenvalue power sums extend `prescribed` and which pass `filters`.
///
/// Output is ordered lexicographically by the coefficient vector (ascending).
/// An empty list is a normal outcome; `short_circuit` reports prescriptions
/// that were inconsistent before any search took place.
pub fn enumerate_real_weil(
    genus: usize,
    q: u64,
    prescribed: &[i64],
    filters: &ValueFilters,
) -> Result<Enumeration, WeilError> {
    if genus == 0 {
        return Err(WeilError::GenusZero);
    }
    let ctx = make_ctx(genus, q, prescribed, filters);
    let (mut coeffs, mut s) = match ctx.forced_prefix() {
        Ok(pair) => pair,
        Err(reason) => {
            return Ok(Enumeration {
                polys: Vec::new(),
                short_circuit: Some(reason),
            })
        }
    };
    if !coeffs.is_empty() && !is_real_rooted_in_weil_interval(&ctx.partial_poly(&coeffs), q) {
        return Ok(Enumeration {
            polys: Vec::new(),
            short_circuit: None,
        });
    }
    let mut out = Vec::new();
    search(&ctx, &mut coeffs, &mut s, &mut |p| {
        out.push(p);
        true
    });
    Ok(Enumeration {
        polys: out,
        short_circuit: None,
    })
}

/// Like [`enumerate_real_weil`] but stops at the first witness.
pub fn exists_real_weil(
    genus: usize,
    q: u64,
    prescribed: &[i64],
    filters: &ValueFilters,
) -> Result<Existence, WeilError> {
    if genus == 0 {
        return Err(WeilError::GenusZero);
    }
    let ctx = make_ctx(genus, q, prescribed, filters);
    let (mut coeffs, mut s) = match ctx.forced_prefix() {
        Ok(pair) => pair,
        Err(reason) => return Ok(Existence::Empty(Some(reason))),
    };
    if !coeffs.is_empty() && !is_real_rooted_in_weil_interval(&ctx.partial_poly(&coeffs), q) {
        return Ok(Existence::Empty(None));
    }
    let mut witness = None;
    search(&ctx, &mut coeffs, &mut s, &mut |p| {
        witness = Some(p);
        false
    });
    Ok(match witness {
        Some(p) => Existence::Witness(p),
        None => Existence::Empty(None),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rw(coeffs: &[i64]) -> RealWeilPolynomial {
        RealWeilPolynomial::from_i64(coeffs, 2).unwrap()
    }

    #[test]
    fn constructor_validates() {
        assert!(RealWeilPolynomial::from_i64(&[2, 1], 2).is_err());
        assert!(RealWeilPolynomial::from_i64(&[1], 2).is_err());
        assert!(RealWeilPolynomial::from_i64(&[1, 0, 1], 2).is_err()); // complex roots
        assert!(RealWeilPolynomial::from_i64(&[1, 2, -1], 2).is_ok());
    }

    #[test]
    fn expansion_fixture_genus2() {
        // h = T^2 + 2T - 1 over F_2 expands to T^4 + 2T^3 + 3T^2 + 4T + 4.
        let data = expand_real_weil(&rw(&[1, 2, -1]));
        let desc: Vec<i64> = data.full_coeffs.iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(desc, vec![1, 2, 3, 4, 4]);
        assert!(data.satisfies_functional_equation());
    }

    #[test]
    fn expansion_fixture_genus1() {
        // h = T - t expands to T^2 - tT + 2.
        for t in -2..=2 {
            let data = expand_real_weil(&rw(&[1, -t]));
            let desc: Vec<i64> = data.full_coeffs.iter().map(|c| c.to_i64().unwrap()).collect();
            assert_eq!(desc, vec![1, -t, 2]);
        }
    }

    #[test]
    fn expansion_fixture_boundary_roots() {
        // h = (T-2)(T+2) = T^2 - 4 expands to T^4 + 0T^3 + 0T^2 + 0T + 4.
        let data = expand_real_weil(&rw(&[1, 0, -4]));
        let desc: Vec<i64> = data.full_coeffs.iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(desc, vec![1, 0, 0, 0, 4]);
    }

    /// Independent oracle: L(x) must equal x^g * h((x^2+q)/x) at integer points,
    /// i.e. sum_i c_i (x^2+q)^{g-i} x^i. Checking at 2g+1 points pins the poly.
    #[test]
    fn expansion_matches_point_evaluation_oracle() {
        for h in [rw(&[1, 2, -1]), rw(&[1, 0, -4]), rw(&[1, -1, -3, 1])] {
            let g = h.genus();
            let data = expand_real_weil(&h);
            let l = IntPoly::from_descending(&data.full_coeffs);
            for x in -(g as i64 + 1)..=(g as i64 + 1) {
                if x == 0 {
                    continue;
                }
                let xi = Int::from(x);
                let mut expected = Int::zero();
                for i in 0..=g {
                    expected += &h.coefficients()[i]
                        * (Int::from(x * x + 2)).pow((g - i) as u32)
                        * xi.pow(i as u32);
                }
                assert_eq!(l.eval(&xi), expected);
            }
        }
    }

    #[test]
    fn point_count_fixtures() {
        let h = rw(&[1, 2, -1]);
        let profile = point_counts(&h, 4).unwrap();
        // N_3 = 11: p_3 = -2 by Newton from L = T^4+2T^3+3T^2+4T+4 and by the
        // complex-root powering oracle (see acceptance suite).
        assert_eq!(profile.counts, vec![Some(5), Some(7), Some(11), Some(15)]);
        let g1 = rw(&[1, 0]);
        assert_eq!(point_counts(&g1, 1).unwrap().counts, vec![Some(3)]);
    }

    #[test]
    fn place_count_fixtures() {
        let profile = PointCountProfile {
            q: 2,
            genus: 2,
            counts: vec![Some(5), Some(7)],
        };
        assert_eq!(profile.place_counts().unwrap(), vec![Some(5), Some(1)]);
        let zeros = PointCountProfile {
            q: 2,
            genus: 6,
            counts: vec![Some(0); 5],
        };
        assert_eq!(zeros.place_counts().unwrap(), vec![Some(0); 5]);
        let six = PointCountProfile {
            q: 2,
            genus: 6,
            counts: vec![Some(0), Some(0), Some(0), Some(0), Some(0), Some(84)],
        };
        assert_eq!(six.place_counts().unwrap()[5], Some(14));
        let bad = PointCountProfile {
            q: 2,
            genus: 2,
            counts: vec![Some(5), Some(6)],
        };
        assert_eq!(
            bad.place_counts(),
            Err(ProfileError::NonIntegralPlaceCount(2))
        );
    }

    #[test]
    fn group_order_fixtures() {
        let h = rw(&[1, 2, -1]);
        assert_eq!(group_order(&h, 1), Int::from(14));
        // Dual route for n = 2: power sums vs the split L(1)*L(-1).
        let data = expand_real_weil(&h);
        let l = IntPoly::from_descending(&data.full_coeffs);
        let via_split = l.eval(&Int::from(1)) * l.eval(&Int::from(-1));
        assert_eq!(group_order(&h, 2), via_split);
        // Genus 1: L(1) = 3 - t.
        for t in -2..=2 {
            assert_eq!(group_order(&rw(&[1, -t]), 1), Int::from(3 - t));
        }
    }

    #[test]
    fn enumerate_genus1_unrestricted() {
        let out = enumerate_real_weil(1, 2, &[], &ValueFilters::default()).unwrap();
        let traces: Vec<i64> = out
            .polys
            .iter()
            .map(|p| -p.coefficients_i64()[1])
            .collect();
        assert_eq!(traces, vec![2, 1, 0, -1, -2]);
    }

    #[test]
    fn enumerate_matches_bruteforce_genus2() {
        let fast = enumerate_real_weil(2, 2, &[], &ValueFilters::default()).unwrap();
        let mut brute = Vec::new();
        for c1 in -6i64..=6 {
            for c2 in -9i64..=9 {
                if RealWeilPolynomial::from_i64(&[1, c1, c2], 2).is_ok() {
                    brute.push(vec![1, c1, c2]);
                }
            }
        }
        let fast_vecs: Vec<Vec<i64>> = fast.polys.iter().map(|p| p.coefficients_i64()).collect();
        assert_eq!(fast_vecs, brute);
    }

    #[test]
    fn prescribed_pairs_rejected() {
        // Known-empty genus-2 trace pairs over F_2.
        for pair in [[-2, -8], [-3, -7], [-4, -6], [-4, -8]] {
            let out = enumerate_real_weil(2, 2, &pair, &ValueFilters::default()).unwrap();
            assert!(out.polys.is_empty(), "{pair:?} should admit no polynomial");
        }
        let ok = enumerate_real_weil(2, 2, &[0, 0], &ValueFilters::default()).unwrap();
        assert!(!ok.polys.is_empty());
    }

    #[test]
    fn prescribed_bound_short_circuits() {
        let out = enumerate_real_weil(1, 2, &[5], &ValueFilters::default()).unwrap();
        assert_eq!(
            out.short_circuit,
            Some(ShortCircuit::WeilBoundViolated { index: 1 })
        );
        assert!(matches!(
            exists_real_weil(2, 2, &[0, -100], &ValueFilters::default()).unwrap(),
            Existence::Empty(Some(ShortCircuit::WeilBoundViolated { index: 2 }))
        ));
    }

    #[test]
    fn exists_short_circuits_and_witnesses() {
        assert!(exists_real_weil(1, 2, &[0], &ValueFilters::default())
            .unwrap()
            .found());
        assert!(!exists_real_weil(2, 2, &[-4, -6], &ValueFilters::default())
            .unwrap()
            .found());
        // Dim-5 prefix used by the degree-5 analysis.
        assert!(!exists_real_weil(5, 2, &[0, -10, -9, -22], &ValueFilters::default())
            .unwrap()
            .found());
        assert!(!exists_real_weil(5, 2, &[0, -10, -9, -10], &ValueFilters::default())
            .unwrap()
            .found());
    }

    #[test]
    fn filters_restrict_enumeration() {
        // Genus 1 with #A(F_2) = 3 - t divisible by 3 forces t = 0.
        let filters = ValueFilters {
            order_divisible: vec![(1, 3)],
            ..Default::default()
        };
        let out = enumerate_real_weil(1, 2, &[], &filters).unwrap();
        assert_eq!(out.polys.len(), 1);
        assert_eq!(out.polys[0].coefficients_i64(), vec![1, 0]);
        // Trace membership filter.
        let filters = ValueFilters {
            trace_in: vec![(1, vec![-2, 2])],
            ..Default::default()
        };
        let out = enumerate_real_weil(1, 2, &[], &filters).unwrap();
        assert_eq!(out.polys.len(), 2);
        // Exact order filter equals post-filtering (fast-path oracle).
        let filters = ValueFilters {
            order_exact: vec![(1, 1)],
            ..Default::default()
        };
        let fast = enumerate_real_weil(2, 2, &[], &filters).unwrap();
        let all = enumerate_real_weil(2, 2, &[], &ValueFilters::default()).unwrap();
        let post: Vec<_> = all
            .polys
            .into_iter()
            .filter(|p| group_order(p, 1) == Int::from(1))
            .collect();
        assert_eq!(fast.polys, post);
    }

    #[test]
    fn long_prefix_checks_beyond_genus() {
        // Prescriptions longer than the genus act as trailing checks.
        let out = enumerate_real_weil(1, 2, &[1, -3, -5, 1, 11], &ValueFilters::default()).unwrap();
        assert_eq!(out.polys.len(), 1);
        assert_eq!(out.polys[0].coefficients_i64(), vec![1, -1]);
        let none = enumerate_real_weil(1, 2, &[1, -3, -5, 1, 12], &ValueFilters::default()).unwrap();
        assert!(none.polys.is_empty());
    }

    #[test]
    fn weil_bound_holds_on_enumerated_outputs() {
        let out = enumerate_real_weil(3, 2, &[], &ValueFilters::default()).unwrap();
        assert!(!out.polys.is_empty());
        for p in &out.polys {
            let sums = expand_real_weil(p).power_sums_to(7);
            for (i, s) in sums.iter().enumerate() {
                let n = i + 1;
                let bound = Int::from(4 * 9) * Int::from(2).pow(n as u32);
                assert!(s * s <= bound, "{p} violates the bound at n={n}");
            }
        }
    }
}
