//! Path languages, the `x ↦ c(2x − x²)` recurrence, bisection on integer
//! polynomials and the rational root test.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::trees::{strip_comment, Alphabet, Rational, Symbol};

/// Trees having an infinite path from the root labelled only with `subset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathLangSpec {
    alphabet: Arc<Alphabet>,
    subset: Vec<Symbol>,
}

impl PathLangSpec {
    pub fn new(alphabet: Arc<Alphabet>, subset: impl IntoIterator<Item = Symbol>) -> Result<Self> {
        let mut subset: Vec<Symbol> = subset.into_iter().collect();
        subset.sort();
        subset.dedup();
        if subset.is_empty() {
            return Err(Error::precondition("the allowed label set is empty"));
        }
        if subset.iter().any(|s| s.index() >= alphabet.len()) {
            return Err(Error::precondition("allowed label outside the alphabet"));
        }
        Ok(PathLangSpec { alphabet, subset })
    }

    /// `alphabet a b c` and `subset a b` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut alphabet = None;
        let mut subset = None;
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let mut words = strip_comment(raw).split_whitespace();
            match words.next() {
                None => {}
                Some("alphabet") => {
                    let a = Alphabet::new(words).map_err(|e| Error::parse(no, e.to_string()))?;
                    alphabet = Some(Arc::new(a));
                }
                Some("subset") => {
                    let a: &Arc<Alphabet> = alphabet
                        .as_ref()
                        .ok_or_else(|| Error::parse(no, "`subset` before `alphabet`"))?;
                    let syms = words
                        .map(|w| a.symbol(w).ok_or_else(|| Error::parse(no, format!("unknown symbol `{w}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    if syms.is_empty() {
                        return Err(Error::parse(no, "the allowed label set is empty"));
                    }
                    subset = Some((syms, no));
                }
                Some(other) => return Err(Error::parse(no, format!("unknown declaration `{other}`"))),
            }
        }
        let last = text.lines().count().max(1);
        let alphabet = alphabet.ok_or_else(|| Error::parse(last, "missing `alphabet` line"))?;
        let (syms, no) = subset.ok_or_else(|| Error::parse(last, "missing `subset` line"))?;
        PathLangSpec::new(alphabet, syms).map_err(|e| Error::parse(no, e.to_string()))
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn subset(&self) -> &[Symbol] {
        &self.subset
    }

    pub fn allows(&self, s: Symbol) -> bool {
        self.subset.binary_search(&s).is_ok()
    }

    /// `c = |A| / |Γ|`.
    pub fn ratio(&self) -> Rational {
        Rational::new(self.subset.len().into(), self.alphabet.len().into())
    }
}

impl fmt::Display for PathLangSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.alphabet)?;
        let names: Vec<&str> = self.subset.iter().map(|&s| self.alphabet.name(s)).collect();
        writeln!(f, "subset {}", names.join(" "))
    }
}

/// `max(0, 2 − |Γ|/|A|)`: the largest fixed point of `x ↦ c(2x − x²)` below 1,
/// which the iteration from 1 converges to.
pub fn path_language_measure(spec: &PathLangSpec) -> Rational {
    let v = Rational::from_integer(2.into()) - spec.ratio().recip();
    if v.is_negative() {
        Rational::zero()
    } else {
        v
    }
}

/// Iterates past this many denominator bits are refused.
const MAX_ITERATE_BITS: u64 = 1 << 26;

fn check_ratio(c: &Rational) -> Result<()> {
    if !c.is_positive() || c > &Rational::one() {
        return Err(Error::precondition(format!("ratio {c} is not in (0, 1]")));
    }
    Ok(())
}

/// Exact iterates `x_0 = 1, x_{i+1} = c(2x_i − x_i²)`, `steps + 1` values.
///
/// Denominators square at every step, so long runs are refused with a budget
/// error; [`recurrence_enclosures`] covers those.
pub fn iterate_recurrence(c: &Rational, steps: usize) -> Result<Vec<Rational>> {
    check_ratio(c)?;
    let (p, q) = (c.numer().clone(), c.denom().clone());
    let q_bits = q.bits().max(1);
    let bits = u32::try_from(steps)
        .ok()
        .and_then(|s| 1u64.checked_shl(s))
        .and_then(|pow| pow.checked_mul(q_bits));
    if bits.is_none_or(|b| b > MAX_ITERATE_BITS) {
        return Err(Error::Budget {
            what: "exact recurrence",
            needed: format!("about {q_bits}·2^{steps} denominator bits"),
            cap: MAX_ITERATE_BITS,
        });
    }
    let mut out = Vec::with_capacity(steps + 1);
    let (mut n, mut d) = (BigInt::one(), BigInt::one());
    out.push(Rational::one());
    for _ in 0..steps {
        // c(2x − x²) = p·n(2d − n) / (q·d²). Every prime of d divides q and
        // none divides n(2d − n), so the fraction is already reduced.
        let next_n = &p * &n * (&d * 2 - &n);
        let next_d = &q * &d * &d;
        n = next_n;
        d = next_d;
        out.push(Rational::new_raw(n.clone(), d.clone()));
    }
    Ok(out)
}

/// Exact comparison by cross-multiplication. `Ord` on big rationals walks a
/// continued fraction, which is slow for the multi-megabit iterates.
pub fn cmp_rational(a: &Rational, b: &Rational) -> Ordering {
    (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
}

/// Certified enclosures `[lo_i, hi_i] ∋ x_i` with endpoints rounded outward
/// to multiples of `2^-bits`. Valid because the map is increasing on `[0, 1]`.
pub fn recurrence_enclosures(c: &Rational, steps: usize, bits: u32) -> Result<Vec<(Rational, Rational)>> {
    check_ratio(c)?;
    let f = |x: &Rational| c * (x * Rational::from_integer(2.into()) - x * x);
    let scale = Rational::from_integer(BigInt::one() << bits);
    let down = |x: Rational| (x * &scale).floor() / &scale;
    let up = |x: Rational| (x * &scale).ceil() / &scale;
    let mut out = vec![(Rational::one(), Rational::one())];
    for _ in 0..steps {
        let (lo, hi) = out.last().expect("starts non-empty");
        let next = (down(f(lo)).max(Rational::zero()), up(f(hi)).min(Rational::one()));
        out.push(next);
    }
    Ok(out)
}

/// Integer polynomial, coefficients stored from the constant term up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Coefficients listed from the highest degree down; leading zeros are
    /// dropped.
    pub fn from_highest_first(coeffs: impl IntoIterator<Item = BigInt>) -> Self {
        let mut coeffs: Vec<BigInt> = coeffs.into_iter().collect();
        coeffs.reverse();
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    /// `1,0,0,-8,4` is `x⁴ − 8x + 4`.
    pub fn parse(text: &str) -> Result<Self> {
        let coeffs = text
            .split(',')
            .map(|w| {
                let w = w.trim();
                w.parse::<BigInt>()
                    .map_err(|_| Error::parse(1, format!("coefficient `{w}` is not an integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_highest_first(coeffs))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coefficient(&self, power: usize) -> BigInt {
        self.coeffs.get(power).cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, a| acc * x + Rational::from_integer(a.clone()))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.coeffs.iter().rev().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// A rational interval known to contain a root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
    pub steps: u32,
}

impl Enclosure {
    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Bisection with exact rational endpoints until the width is at most `tol`.
pub fn solve_fixed_point(p: &IntPolynomial, lo: &Rational, hi: &Rational, tol: &Rational) -> Result<Enclosure> {
    if p.is_zero() {
        return Err(Error::precondition("the zero polynomial has no isolated root"));
    }
    if lo > hi {
        return Err(Error::precondition(format!("empty interval [{lo}, {hi}]")));
    }
    if !tol.is_positive() {
        return Err(Error::precondition("tolerance must be positive"));
    }
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let (mut f_lo, f_hi) = (p.eval(&lo), p.eval(&hi));
    if f_lo.is_zero() {
        return Ok(Enclosure { hi: lo.clone(), lo, steps: 0 });
    }
    if f_hi.is_zero() {
        return Ok(Enclosure { lo: hi.clone(), hi, steps: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::precondition(format!(
            "no sign change on [{lo}, {hi}]: both ends evaluate to {} values",
            if f_lo.is_positive() { "positive" } else { "negative" }
        )));
    }
    let mut steps = 0;
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        let f_mid = p.eval(&mid);
        steps += 1;
        if f_mid.is_zero() {
            return Ok(Enclosure { lo: mid.clone(), hi: mid, steps });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Enclosure { lo, hi, steps })
}

/// Positive divisors in increasing order.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Candidates `±d/e` with `d` dividing the lowest non-zero coefficient and `e`
/// the leading one, preceded by 0 when `x` divides the polynomial. Ordered by
/// `e`, then `d`, positive first; each rational appears once.
pub fn rational_root_candidates(p: &IntPolynomial) -> Result<Vec<Rational>> {
    let Some(deg) = p.degree() else {
        return Err(Error::precondition("the zero polynomial vanishes everywhere"));
    };
    let low = (0..=deg).find(|&i| !p.coefficient(i).is_zero()).expect("non-zero polynomial");
    let mut out = Vec::new();
    if low > 0 {
        out.push(Rational::zero());
    }
    if low == deg {
        return Ok(out);
    }
    let constant = p.coefficient(low);
    let leading = p.coefficient(deg);
    let ds = divisors(&constant);
    for e in divisors(&leading) {
        for d in &ds {
            if !d.gcd(&e).is_one() {
                continue;
            }
            out.push(Rational::new(d.clone(), e.clone()));
            out.push(Rational::new(-d.clone(), e.clone()));
        }
    }
    Ok(out)
}

/// The rational roots of `p`, found by testing every rational root theorem
/// candidate exactly.
pub fn rational_root_check(p: &IntPolynomial) -> Result<Vec<Rational>> {
    Ok(rational_root_candidates(p)?
        .into_iter()
        .filter(|x| p.eval(x).is_zero())
        .collect())
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.6` or `1e-9`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::parse(1, format!("`{t}` is not a rational number"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::parse(1, format!("`{t}` has a zero denominator")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((mantissa, exp)) = t.split_once(['e', 'E']) {
        let exp: i32 = exp.parse().map_err(|_| bad())?;
        if exp.unsigned_abs() > 10_000 || mantissa.is_empty() {
            return Err(bad());
        }
        let m = parse_rational(mantissa).map_err(|_| bad())?;
        let scale = Rational::from_integer(num_traits::pow(BigInt::from(10), exp.unsigned_abs() as usize));
        return Ok(if exp < 0 { m / scale } else { m * scale });
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{frac}", whole.trim_start_matches(['-', '+']));
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let n = if negative { -n } else { n };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n, scale));
    }
    Ok(Rational::from_integer(t.parse().map_err(|_| bad())?))
}

/// Decimal rendering with `digits` fractional digits, rounded half away from zero.
pub fn to_decimal(x: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (x.abs() * Rational::from_integer(scale.clone())).round().to_integer();
    let (int, frac) = scaled.div_rem(&scale);
    let sign = if x.is_negative() && !scaled.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
}

/// Nearest `f64`, for display and coarse comparisons only.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn spec(alphabet: &str, subset: &str) -> PathLangSpec {
        PathLangSpec::parse(&format!("alphabet {alphabet}\nsubset {subset}\n")).unwrap()
    }

    #[test]
    fn path_measures() {
        assert_eq!(path_language_measure(&spec("a b c", "a b")), r(1, 2));
        assert_eq!(path_language_measure(&spec("a b", "a")), r(0, 1));
        assert_eq!(path_language_measure(&spec("a b c", "a")), r(0, 1));
        assert_eq!(path_language_measure(&spec("a b", "b a")), r(1, 1));
        assert_eq!(path_language_measure(&spec("a b c d", "a b c")), r(2, 3));
    }

    #[test]
    fn path_spec_errors() {
        assert!(PathLangSpec::parse("alphabet a b\nsubset c\n").is_err());
        assert!(PathLangSpec::parse("subset a\n").is_err());
        assert!(PathLangSpec::parse("alphabet a b\nsubset\n").is_err());
        assert!(PathLangSpec::parse("alphabet a b\n").is_err());
    }

    #[test]
    fn first_iterates() {
        let xs = iterate_recurrence(&r(2, 3), 2).unwrap();
        assert_eq!(xs, vec![r(1, 1), r(2, 3), r(16, 27)]);
        let xs = iterate_recurrence(&r(3, 4), 3).unwrap();
        for w in xs.windows(2) {
            // new_raw must still yield reduced fractions
            let reduced = Rational::new(w[1].numer().clone(), w[1].denom().clone());
            assert_eq!(w[1].numer(), reduced.numer());
            assert_eq!(&w[1], &(r(3, 4) * (&w[0] * r(2, 1) - &w[0] * &w[0])));
        }
    }

    #[test]
    fn twenty_exact_steps_at_two_thirds() {
        let xs = iterate_recurrence(&r(2, 3), 20).unwrap();
        assert!(xs.windows(2).all(|w| cmp_rational(&w[1], &w[0]).is_le()));
        assert!(xs.iter().all(|x| cmp_rational(x, &r(1, 2)).is_ge()));
        assert!(cmp_rational(&xs[20], &r(1001, 2000)).is_lt());
    }

    #[test]
    fn long_exact_runs_are_refused() {
        assert!(matches!(iterate_recurrence(&r(2, 3), 50), Err(Error::Budget { .. })));
        assert!(iterate_recurrence(&r(0, 1), 1).is_err());
        assert!(iterate_recurrence(&r(3, 2), 1).is_err());
    }

    #[test]
    fn enclosures_contain_exact_iterates() {
        for c in [r(1, 3), r(1, 2), r(2, 3), r(3, 4), r(1, 1)] {
            let exact = iterate_recurrence(&c, 12).unwrap();
            let boxes = recurrence_enclosures(&c, 12, 64).unwrap();
            for (x, (lo, hi)) in exact.iter().zip(&boxes) {
                assert!(lo <= x && x <= hi, "c={c}");
            }
        }
    }

    #[test]
    fn fifty_iterates_via_enclosures() {
        for c in [r(1, 3), r(1, 2), r(2, 3), r(3, 4), r(1, 1)] {
            let limit = (r(2, 1) - c.recip()).max(r(0, 1));
            let boxes = recurrence_enclosures(&c, 50, 128).unwrap();
            assert_eq!(boxes.len(), 51);
            assert_eq!(boxes[0], (r(1, 1), r(1, 1)));
            // x >= 2 - 1/c gives c(2 - x) <= 1, i.e. the next iterate is not larger;
            // for c >= 1/2 that threshold is the limit itself
            assert!(boxes.iter().all(|(lo, _)| lo >= &limit), "c={c}");
            let (lo, hi) = &boxes[50];
            if c == r(1, 2) {
                // x_{i+1} = x_i - x_i^2 / 2 creeps to 0 like 2/i
                assert!(lo > &r(3, 100) && hi < &r(5, 100));
            } else {
                assert!(hi - &limit < r(1, 1_000_000), "c={c}");
            }
        }
    }

    #[test]
    fn bisection_examples() {
        let p = IntPolynomial::parse("1,0,0,-8,4").unwrap();
        let tol = r(1, 1_000_000_000);
        let e = solve_fixed_point(&p, &r(0, 1), &r(1, 1), &tol).unwrap();
        assert!(e.width() <= tol);
        let m = e.midpoint();
        assert!(m > r(5083, 10000) && m < r(5084, 10000));
        let residual = &m - r(1, 2) - &m * &m * &m * &m / r(8, 1);
        assert!(residual.abs() < tol);
        assert!(p.eval(&e.lo).signum() != p.eval(&e.hi).signum());

        let half = solve_fixed_point(&IntPolynomial::parse("2,-1").unwrap(), &r(0, 1), &r(1, 1), &tol).unwrap();
        assert_eq!(half.midpoint(), r(1, 2));

        assert!(matches!(
            solve_fixed_point(&p, &r(6, 10), &r(1, 1), &tol),
            Err(Error::Precondition(_))
        ));
        assert!(solve_fixed_point(&IntPolynomial::parse("1,0,1").unwrap(), &r(0, 1), &r(1, 1), &tol).is_err());
    }

    #[test]
    fn rational_roots() {
        let check = |s: &str| rational_root_check(&IntPolynomial::parse(s).unwrap()).unwrap();
        assert!(check("1,0,0,-8,4").is_empty());
        assert_eq!(check("2,-1"), vec![r(1, 2)]);
        assert_eq!(check("1,0,-1"), vec![r(1, 1), r(-1, 1)]);
        assert_eq!(check("1,-1,0"), vec![r(0, 1), r(1, 1)]);
        assert_eq!(check("0,0,3"), Vec::<Rational>::new());
        assert!(rational_root_check(&IntPolynomial::parse("0,0").unwrap()).is_err());
        let cands = rational_root_candidates(&IntPolynomial::parse("1,0,0,-8,4").unwrap()).unwrap();
        assert_eq!(cands, [1, -1, 2, -2, 4, -4].map(|n| r(n, 1)).to_vec());
    }

    #[test]
    fn parsing_numbers() {
        assert_eq!(parse_rational("3/6").unwrap(), r(1, 2));
        assert_eq!(parse_rational("0.6").unwrap(), r(3, 5));
        assert_eq!(parse_rational("-2").unwrap(), r(-2, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(parse_rational("1e-9").unwrap(), r(1, 1_000_000_000));
        assert_eq!(parse_rational("2.5E2").unwrap(), r(250, 1));
        assert!(parse_rational("e5").is_err());
        assert!(parse_rational("1e2e3").is_err());
        assert!(IntPolynomial::parse("1,,2").is_err());
        assert_eq!(IntPolynomial::parse("0,2,-1").unwrap().to_string(), "2,-1");
    }

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&r(1, 2), 12), "0.500000000000");
        assert_eq!(to_decimal(&r(2, 3), 3), "0.667");
        assert_eq!(to_decimal(&r(-1, 8), 2), "-0.13");
        assert_eq!(to_decimal(&r(7, 1), 0), "7");
        assert!((to_f64(&r(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
    }

    fn poly_from_roots(roots: &[(i64, i64)], extra: i64) -> IntPolynomial {
        // Π (q x − p) · (x² + extra) with extra > 0 contributing no real roots
        let mut coeffs: Vec<BigInt> = vec![BigInt::from(extra), BigInt::zero(), BigInt::one()];
        for &(p, q) in roots {
            let mut next = vec![BigInt::zero(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c * q;
                next[i] -= c * p;
            }
            coeffs = next;
        }
        coeffs.reverse();
        IntPolynomial::from_highest_first(coeffs)
    }

    proptest! {
        #[test]
        fn root_check_agrees_with_evaluation(
            roots in proptest::collection::vec((-6i64..=6, 1i64..=4), 0..3),
            extra in 1i64..5,
        ) {
            let p = poly_from_roots(&roots, extra);
            let found = rational_root_check(&p).unwrap();
            for (n, d) in roots {
                prop_assert!(found.contains(&r(n, d)));
            }
            for c in rational_root_candidates(&p).unwrap() {
                prop_assert_eq!(found.contains(&c), p.eval(&c).is_zero());
            }
        }

        #[test]
        fn bisection_brackets_a_sign_change(a in -20i64..20, b in 1i64..20, k in 1u32..40) {
            // (b x − a)(x² + 1) has its only real root at a/b
            let p = poly_from_roots(&[(a, b)], 1);
            let tol = r(1, 1 << 20);
            let lo = r(a, b) - r(k as i64, 7);
            let hi = r(a, b) + r(1, k as i64 + 2);
            let e = solve_fixed_point(&p, &lo, &hi, &tol).unwrap();
            prop_assert!(e.lo <= r(a, b) && r(a, b) <= e.hi);
            prop_assert!(e.width() <= tol);
        }
    }
}
