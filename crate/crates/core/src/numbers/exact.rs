//! Exact real numbers in towers of quadratic extensions.
//!
//! A value is either a rational or `lo + hi·√s` over a parent field, where `s` is a
//! positive non-square of the parent and `hi ≠ 0`. That normal form is unique, so
//! structural equality is value equality and the zero test is free.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::NumberError;

/// Maximum number of stacked square roots in a tower.
pub const MAX_DEPTH: usize = 4;

/// A real quadratic extension `parent(√radicand)`.
pub struct Field {
    id: u64,
    depth: usize,
    parent: Option<Arc<Field>>,
    radicand: ExactNumber,
}

impl Field {
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Number of square roots between ℚ and this field.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn parent(&self) -> Option<&Arc<Field>> {
        self.parent.as_ref()
    }

    /// The element of the parent field whose square root generates this one.
    pub fn radicand(&self) -> &ExactNumber {
        &self.radicand
    }

    /// The generator `√radicand` as an element of this field.
    pub fn generator(self: &Arc<Self>) -> ExactNumber {
        ExactNumber::quad(self.clone(), ExactNumber::zero(), ExactNumber::one())
    }

    fn contains_field(&self, id: u64) -> bool {
        let mut cur = self;
        loop {
            if cur.id == id {
                return true;
            }
            match &cur.parent {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Field#{}(√({}), depth {})",
            self.id, self.radicand, self.depth
        )
    }
}

fn registry() -> &'static Mutex<Vec<Arc<Field>>> {
    static REG: OnceLock<Mutex<Vec<Arc<Field>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(Vec::new()))
}

/// Returns the (deduplicated) field `parent(√radicand)`.
///
/// The caller guarantees that `radicand` lies in `parent`, is positive, and is not a square there.
fn extend_field(
    parent: Option<Arc<Field>>,
    radicand: ExactNumber,
) -> Result<Arc<Field>, NumberError> {
    let depth = parent.as_ref().map_or(0, |p| p.depth) + 1;
    if depth > MAX_DEPTH {
        return Err(NumberError::DepthExceeded(MAX_DEPTH));
    }
    let parent_id = parent.as_ref().map(|p| p.id);
    let mut reg = registry().lock().expect("tower registry poisoned");
    if let Some(f) = reg
        .iter()
        .find(|f| f.parent.as_ref().map(|p| p.id) == parent_id && f.radicand == radicand)
    {
        return Ok(f.clone());
    }
    let field = Arc::new(Field {
        id: reg.len() as u64 + 1,
        depth,
        parent,
        radicand,
    });
    reg.push(field.clone());
    Ok(field)
}

/// Exact element of ℚ or of a quadratic tower over ℚ.
#[derive(Clone)]
pub struct ExactNumber(Repr);

#[derive(Clone)]
enum Repr {
    Rat(BigRational),
    Quad(Arc<Quad>),
}

struct Quad {
    field: Arc<Field>,
    lo: ExactNumber,
    hi: ExactNumber,
}

type Res = Result<ExactNumber, NumberError>;

impl ExactNumber {
    pub fn zero() -> Self {
        ExactNumber(Repr::Rat(BigRational::zero()))
    }

    pub fn one() -> Self {
        ExactNumber(Repr::Rat(BigRational::one()))
    }

    pub fn from_int(n: i64) -> Self {
        ExactNumber(Repr::Rat(BigRational::from_integer(BigInt::from(n))))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        ExactNumber(Repr::Rat(BigRational::new(
            BigInt::from(n),
            BigInt::from(d),
        )))
    }

    pub fn from_rational(r: BigRational) -> Self {
        ExactNumber(Repr::Rat(r))
    }

    fn quad(field: Arc<Field>, lo: ExactNumber, hi: ExactNumber) -> Self {
        if hi.is_zero() {
            lo
        } else {
            ExactNumber(Repr::Quad(Arc::new(Quad { field, lo, hi })))
        }
    }

    /// The smallest tower field containing this value, or `None` for rationals.
    pub fn field(&self) -> Option<&Arc<Field>> {
        match &self.0 {
            Repr::Rat(_) => None,
            Repr::Quad(q) => Some(&q.field),
        }
    }

    pub fn depth(&self) -> usize {
        self.field().map_or(0, |f| f.depth)
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Rat(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rat(r) => Some(r),
            Repr::Quad(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// `(lo, hi)` with `self = lo + hi·√s` for the generator of `field`.
    fn split(&self, field: &Arc<Field>) -> (ExactNumber, ExactNumber) {
        match &self.0 {
            Repr::Quad(q) if q.field.id == field.id => (q.lo.clone(), q.hi.clone()),
            _ => (self.clone(), ExactNumber::zero()),
        }
    }

    /// Components over this value's own top field: `(lo, hi, radicand)`.
    pub fn components(&self) -> Option<(ExactNumber, ExactNumber, ExactNumber)> {
        match &self.0 {
            Repr::Rat(_) => None,
            Repr::Quad(q) => Some((q.lo.clone(), q.hi.clone(), q.field.radicand.clone())),
        }
    }

    pub fn checked_add(&self, o: &Self) -> Res {
        if let (Repr::Rat(a), Repr::Rat(b)) = (&self.0, &o.0) {
            return Ok(ExactNumber(Repr::Rat(a + b)));
        }
        let f = join(self.field(), o.field())?.expect("non-rational operand");
        let (al, ah) = self.split(&f);
        let (bl, bh) = o.split(&f);
        Ok(Self::quad(f, al.checked_add(&bl)?, ah.checked_add(&bh)?))
    }

    pub fn checked_sub(&self, o: &Self) -> Res {
        self.checked_add(&o.negated())
    }

    pub fn negated(&self) -> Self {
        match &self.0 {
            Repr::Rat(r) => ExactNumber(Repr::Rat(-r)),
            Repr::Quad(q) => Self::quad(q.field.clone(), q.lo.negated(), q.hi.negated()),
        }
    }

    pub fn checked_mul(&self, o: &Self) -> Res {
        if let (Repr::Rat(a), Repr::Rat(b)) = (&self.0, &o.0) {
            return Ok(ExactNumber(Repr::Rat(a * b)));
        }
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero());
        }
        let f = join(self.field(), o.field())?.expect("non-rational operand");
        let (al, ah) = self.split(&f);
        let (bl, bh) = o.split(&f);
        if ah.is_zero() {
            return Ok(Self::quad(f, al.checked_mul(&bl)?, al.checked_mul(&bh)?));
        }
        if bh.is_zero() {
            return Ok(Self::quad(f, al.checked_mul(&bl)?, ah.checked_mul(&bl)?));
        }
        let s = &f.radicand;
        let lo = al
            .checked_mul(&bl)?
            .checked_add(&ah.checked_mul(&bh)?.checked_mul(s)?)?;
        let hi = al.checked_mul(&bh)?.checked_add(&ah.checked_mul(&bl)?)?;
        Ok(Self::quad(f, lo, hi))
    }

    pub fn checked_inv(&self) -> Res {
        match &self.0 {
            Repr::Rat(r) => {
                if r.is_zero() {
                    Err(NumberError::DivisionByZero)
                } else {
                    Ok(ExactNumber(Repr::Rat(r.recip())))
                }
            }
            Repr::Quad(q) => {
                // (lo - hi√s) / (lo² - hi²s); the norm is nonzero because √s is not in the parent.
                let norm =
                    q.lo.checked_mul(&q.lo)?
                        .checked_sub(&q.hi.checked_mul(&q.hi)?.checked_mul(&q.field.radicand)?)?;
                let inv = norm.checked_inv()?;
                Ok(Self::quad(
                    q.field.clone(),
                    q.lo.checked_mul(&inv)?,
                    q.hi.negated().checked_mul(&inv)?,
                ))
            }
        }
    }

    pub fn checked_div(&self, o: &Self) -> Res {
        self.checked_mul(&o.checked_inv()?)
    }

    /// Sign under the real embedding where every generator is the positive root.
    pub fn signum(&self) -> i8 {
        match &self.0 {
            Repr::Rat(r) => match r.numer().sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
            Repr::Quad(q) => {
                let sl = q.lo.signum();
                let sh = q.hi.signum();
                if sl == 0 || sl == sh {
                    return sh;
                }
                // Opposite signs: the term of larger magnitude wins.
                let t = &q.lo * &q.lo - &(&q.hi * &q.hi) * &q.field.radicand;
                if t.signum() > 0 {
                    sl
                } else {
                    sh
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            self.negated()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Positive square root if it already lies in this value's own field.
    pub fn sqrt_exact(&self) -> Option<Self> {
        sqrt_within(self, self.field())
    }

    /// Positive square root if it lies in `field` (which must contain `self`).
    pub fn sqrt_in(&self, field: Option<&Arc<Field>>) -> Option<Self> {
        sqrt_within(self, field)
    }

    /// Whether this value and `other` can be combined arithmetically.
    pub fn compatible(&self, other: &Self) -> bool {
        join(self.field(), other.field()).is_ok()
    }

    /// Largest bit length of any rational numerator/denominator inside the value.
    pub fn height_bits(&self) -> u64 {
        match &self.0 {
            Repr::Rat(r) => r.numer().bits().max(r.denom().bits()),
            Repr::Quad(q) => {
                q.lo.height_bits()
                    .max(q.hi.height_bits())
                    .max(q.field.radicand.height_bits())
            }
        }
    }

    /// Quick `f64` approximation (not error controlled; see `to_float` for that).
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Rat(r) => rational_to_f64(r),
            Repr::Quad(q) => q.lo.to_f64() + q.hi.to_f64() * q.field.radicand.to_f64().sqrt(),
        }
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    let (n, d) = (r.numer(), r.denom());
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() && b != 0.0 => a / b,
        _ => {
            // Scale both down so the quotient survives the conversion.
            let shift = n.bits().max(d.bits()).saturating_sub(900);
            let a = (n >> shift).to_f64().unwrap_or(0.0);
            let b = (d >> shift).to_f64().unwrap_or(1.0);
            a / b
        }
    }
}

/// Field containing both arguments, or an error if the towers diverge.
fn join(a: Option<&Arc<Field>>, b: Option<&Arc<Field>>) -> Result<Option<Arc<Field>>, NumberError> {
    match (a, b) {
        (None, None) => Ok(None),
        (Some(f), None) | (None, Some(f)) => Ok(Some(f.clone())),
        (Some(fa), Some(fb)) => {
            let (deep, shallow) = if fa.depth >= fb.depth {
                (fa, fb)
            } else {
                (fb, fa)
            };
            if deep.contains_field(shallow.id) {
                Ok(Some(deep.clone()))
            } else {
                Err(NumberError::IncompatibleTowers)
            }
        }
    }
}

/// Field joining every argument.
pub fn common_field<'a, I: IntoIterator<Item = &'a ExactNumber>>(
    xs: I,
) -> Result<Option<Arc<Field>>, NumberError> {
    let mut acc: Option<Arc<Field>> = None;
    for x in xs {
        acc = join(acc.as_ref(), x.field())?;
    }
    Ok(acc)
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

fn sqrt_within(x: &ExactNumber, field: Option<&Arc<Field>>) -> Option<ExactNumber> {
    let sign = x.signum();
    if sign < 0 {
        return None;
    }
    if sign == 0 {
        return Some(ExactNumber::zero());
    }
    let f = match field {
        None => {
            return x
                .as_rational()
                .and_then(rational_sqrt)
                .map(ExactNumber::from_rational)
        }
        Some(f) => f,
    };
    let parent = f.parent.as_ref();
    let s = &f.radicand;
    let (l, h) = x.split(f);
    if h.is_zero() {
        if let Some(p) = sqrt_within(&l, parent) {
            return Some(p);
        }
        let q = sqrt_within(&(&l / s), parent)?;
        return Some(ExactNumber::quad(f.clone(), ExactNumber::zero(), q));
    }
    let norm = &(&l * &l) - &(&(&h * &h) * s);
    let n = sqrt_within(&norm, parent)?;
    let half = ExactNumber::from_ratio(1, 2);
    for cand in [&(&l + &n) * &half, &(&l - &n) * &half] {
        if let Some(p) = sqrt_within(&cand, parent) {
            if p.is_zero() {
                continue;
            }
            let q = &h / &(&p * &ExactNumber::from_int(2));
            let r = ExactNumber::quad(f.clone(), p, q);
            if &(&r * &r) == x {
                return Some(r.abs());
            }
        }
    }
    None
}

/// Splits a positive rational as `coef²·core` with a small square-free-ish integer core.
fn rational_surd(r: &BigRational) -> (BigRational, BigInt) {
    // √(n/d) = √(n·d)/d
    let m = r.numer() * r.denom();
    let mut core = BigInt::one();
    let mut out = BigInt::one();
    let mut rest = m;
    let mut p = 2u32;
    while p < 20_000 {
        let pb = BigInt::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0u32;
        while rest.is_multiple_of(&pb) {
            rest /= &pb;
            e += 1;
        }
        if e > 0 {
            out *= pb.pow(e / 2);
            if e % 2 == 1 {
                core *= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let rs = rest.sqrt();
    if &rs * &rs == rest {
        out *= rs;
    } else {
        core *= rest;
    }
    (BigRational::new(out, r.denom().clone()), core)
}

/// Shared tower registry handle: every square root taken through one context lands in a
/// single chain of fields, so values parsed together always combine.
#[derive(Default)]
pub struct TowerContext {
    top: Mutex<Option<Arc<Field>>>,
}

impl TowerContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Current top of the chain (`None` while everything is rational).
    pub fn top(&self) -> Option<Arc<Field>> {
        self.top.lock().expect("tower context poisoned").clone()
    }

    /// Makes the chain contain `x`'s field.
    pub fn absorb(&self, x: &ExactNumber) -> Result<(), NumberError> {
        let mut top = self.top.lock().expect("tower context poisoned");
        *top = join(top.as_ref(), x.field())?;
        Ok(())
    }

    /// Positive square root of `x`, adjoining a new level to the chain when needed.
    pub fn sqrt(&self, x: &ExactNumber) -> Res {
        if x.is_negative() {
            return Err(NumberError::NegativeRadicand(x.to_string()));
        }
        let mut top = self.top.lock().expect("tower context poisoned");
        let joined = join(top.as_ref(), x.field())?;
        *top = joined.clone();
        if let Some(r) = sqrt_within(x, joined.as_ref()) {
            return Ok(r);
        }
        let (coef, radicand) = match x.as_rational() {
            Some(r) => {
                let (c, core) = rational_surd(r);
                (
                    ExactNumber::from_rational(c),
                    ExactNumber::from_rational(BigRational::from_integer(core)),
                )
            }
            None => (ExactNumber::one(), x.clone()),
        };
        let f = extend_field(joined, radicand)?;
        *top = Some(f.clone());
        Ok(&coef * &f.generator())
    }
}

impl PartialEq for ExactNumber {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => a == b,
            (Repr::Quad(a), Repr::Quad(b)) => {
                a.field.id == b.field.id && a.lo == b.lo && a.hi == b.hi
            }
            _ => false,
        }
    }
}

impl Eq for ExactNumber {}

impl PartialOrd for ExactNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = self.checked_sub(other).ok()?;
        Some(d.signum().cmp(&0))
    }
}

impl Default for ExactNumber {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for ExactNumber {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for ExactNumber {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rat(r) => f.write_str(&fmt_rational(r)),
            Repr::Quad(q) => {
                let root = format!("sqrt({})", q.field.radicand);
                let (neg, hi_txt) = match q.hi.as_rational() {
                    Some(c) => {
                        let mag = c.abs();
                        let txt = if mag.is_one() {
                            root
                        } else {
                            format!("{}*{}", fmt_rational(&mag), root)
                        };
                        (c.is_negative(), txt)
                    }
                    None => (false, format!("({})*{}", q.hi, root)),
                };
                if q.lo.is_zero() {
                    if neg {
                        write!(f, "-{hi_txt}")
                    } else {
                        f.write_str(&hi_txt)
                    }
                } else {
                    write!(f, "{} {} {}", q.lo, if neg { '-' } else { '+' }, hi_txt)
                }
            }
        }
    }
}

impl fmt::Debug for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&ExactNumber> for &ExactNumber {
            type Output = ExactNumber;
            fn $m(self, rhs: &ExactNumber) -> ExactNumber {
                self.$checked(rhs)
                    .unwrap_or_else(|e| panic!("exact arithmetic: {e}"))
            }
        }
        impl $tr<ExactNumber> for ExactNumber {
            type Output = ExactNumber;
            fn $m(self, rhs: ExactNumber) -> ExactNumber {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ExactNumber> for ExactNumber {
            type Output = ExactNumber;
            fn $m(self, rhs: &ExactNumber) -> ExactNumber {
                (&self).$m(rhs)
            }
        }
        impl $tr<ExactNumber> for &ExactNumber {
            type Output = ExactNumber;
            fn $m(self, rhs: ExactNumber) -> ExactNumber {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for ExactNumber {
    type Output = ExactNumber;
    fn neg(self) -> ExactNumber {
        self.negated()
    }
}

impl Neg for &ExactNumber {
    type Output = ExactNumber;
    fn neg(self) -> ExactNumber {
        self.negated()
    }
}

impl std::iter::Sum for ExactNumber {
    fn sum<I: Iterator<Item = ExactNumber>>(iter: I) -> Self {
        iter.fold(ExactNumber::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactNumber {
        ExactNumber::from_ratio(n, d)
    }

    #[test]
    fn sqrt_seven_squares_back() {
        let ctx = TowerContext::new();
        let r = ctx.sqrt(&q(7, 1)).unwrap();
        assert_eq!(&r * &r, q(7, 1));
        assert!(r.is_positive());
    }

    #[test]
    fn rational_surd_extracts_squares() {
        let ctx = TowerContext::new();
        let r = ctx.sqrt(&q(115, 13)).unwrap();
        assert_eq!(r.to_string(), "1/13*sqrt(1495)");
        let s = ctx.sqrt(&q(1495, 1)).unwrap();
        assert_eq!(&r * &q(13, 1), s);
    }

    #[test]
    fn nested_root_and_denesting() {
        let ctx = TowerContext::new();
        let s5 = ctx.sqrt(&q(5, 1)).unwrap();
        // 6 + 2√5 = (1 + √5)²
        let t = &q(6, 1) + &(&q(2, 1) * &s5);
        let r = ctx.sqrt(&t).unwrap();
        assert_eq!(r, &q(1, 1) + &s5);
        assert_eq!(r.depth(), 1);
        let u = ctx.sqrt(&(&s5 - &q(2, 1))).unwrap();
        assert_eq!(u.depth(), 2);
        assert_eq!(&u * &u, &s5 - &q(2, 1));
    }

    #[test]
    fn sign_of_small_difference() {
        let ctx = TowerContext::new();
        let s2 = ctx.sqrt(&q(2, 1)).unwrap();
        // 140/99 < √2 < 99/70
        assert!((&s2 - &q(140, 99)).is_positive());
        assert!((&s2 - &q(99, 70)).is_negative());
    }

    #[test]
    fn incompatible_towers_error() {
        let a = TowerContext::new().sqrt(&q(2, 1)).unwrap();
        let b = TowerContext::new().sqrt(&q(3, 1)).unwrap();
        assert!(matches!(
            a.checked_add(&b),
            Err(NumberError::IncompatibleTowers)
        ));
    }

    #[test]
    fn depth_cap_enforced() {
        let ctx = TowerContext::new();
        for p in [2, 3, 5, 7] {
            ctx.sqrt(&q(p, 1)).unwrap();
        }
        assert!(matches!(
            ctx.sqrt(&q(11, 1)),
            Err(NumberError::DepthExceeded(_))
        ));
    }

    #[test]
    fn inverse_round_trip() {
        let ctx = TowerContext::new();
        let s = ctx.sqrt(&q(3, 1)).unwrap();
        let x = &q(2, 1) - &s;
        assert_eq!(&x * &x.checked_inv().unwrap(), ExactNumber::one());
    }
}
