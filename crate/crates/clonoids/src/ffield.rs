//! Exact arithmetic in prime-power fields GF(p^k) and in finite products of
//! such fields, plus canonical element enumeration and the coprimality check
//! that every lattice-level computation relies on.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest supported extension degree; irreducibility testing is by trial
/// division, which we only ship for small degrees.
pub const MAX_EXTENSION_DEGREE: u32 = 8;

/// An element of GF(p^k), stored as its canonical code in `[0, q)`.
///
/// The base-p digits of the code, least significant first, are the polynomial
/// coefficients of the element. This gives every field a total element order
/// that is used for all table indexing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u64);

impl FieldElement {
    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Serialize, Deserialize)]
struct FieldSpecRepr {
    p: u64,
    k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    poly: Option<Vec<u64>>,
}

/// Description of GF(p^k): characteristic, extension degree and the monic
/// irreducible modulus polynomial (coefficients constant term first).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FieldSpecRepr", into = "FieldSpecRepr")]
pub struct FieldSpec {
    p: u64,
    k: u32,
    poly: Vec<u64>,
    q: u64,
}

impl From<FieldSpec> for FieldSpecRepr {
    fn from(spec: FieldSpec) -> Self {
        FieldSpecRepr {
            p: spec.p,
            k: spec.k,
            poly: Some(spec.poly),
        }
    }
}

impl TryFrom<FieldSpecRepr> for FieldSpec {
    type Error = Error;

    fn try_from(repr: FieldSpecRepr) -> Result<Self> {
        FieldSpec::new(repr.p, repr.k, repr.poly.as_deref())
    }
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Remainder of polynomial division over F_p; `divisor` must be monic.
/// Coefficient vectors are constant term first.
fn poly_rem(dividend: &[u64], divisor: &[u64], p: u64) -> Vec<u64> {
    let d = divisor.len() - 1;
    let mut rem = dividend.to_vec();
    while rem.len() > d {
        let lead = *rem.last().unwrap() % p;
        let shift = rem.len() - 1 - d;
        if lead != 0 {
            for (j, &c) in divisor.iter().enumerate().take(d) {
                let sub = lead * c % p;
                let idx = shift + j;
                rem[idx] = (rem[idx] + p - sub) % p;
            }
        }
        rem.pop();
    }
    rem
}

fn is_zero_poly(poly: &[u64]) -> bool {
    poly.iter().all(|&c| c == 0)
}

/// A monic polynomial of degree >= 1 over F_p is irreducible iff no monic
/// polynomial of degree between 1 and deg/2 divides it.
fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let k = poly.len() - 1;
    for d in 1..=k / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                divisor.push(c % p);
                c /= p;
            }
            divisor.push(1);
            if is_zero_poly(&poly_rem(poly, &divisor, p)) {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// Builds a validated GF(p^k). When `poly` is omitted and k > 1, the
    /// lexicographically least monic irreducible polynomial of degree k is
    /// selected (coefficients compared constant term first), so the spec is
    /// deterministic across platforms.
    pub fn new(p: u64, k: u32, poly: Option<&[u64]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 || k > MAX_EXTENSION_DEGREE {
            return Err(Error::BadDegree(format!(
                "extension degree must be in 1..={MAX_EXTENSION_DEGREE}, got {k}"
            )));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= 1 << 32)
            .ok_or_else(|| Error::BadRange(format!("field order {p}^{k} too large")))?;
        let poly = match poly {
            Some(coeffs) => {
                if coeffs.len() != k as usize + 1 || *coeffs.last().unwrap() != 1 {
                    return Err(Error::BadDegree(format!(
                        "modulus must be monic of degree {k} (got {} coefficients)",
                        coeffs.len()
                    )));
                }
                if coeffs.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidElement {
                        value: *coeffs.iter().find(|&&c| c >= p).unwrap(),
                        order: p,
                    });
                }
                if k == 1 {
                    if coeffs != [0, 1] {
                        return Err(Error::BadDegree(
                            "degree-1 modulus must be x, i.e. [0, 1]".into(),
                        ));
                    }
                } else if !is_irreducible(coeffs, p) {
                    return Err(Error::Reducible { p });
                }
                coeffs.to_vec()
            }
            None => {
                if k == 1 {
                    vec![0, 1]
                } else {
                    Self::least_irreducible(p, k)?
                }
            }
        };
        Ok(FieldSpec { p, k, poly, q })
    }

    /// GF(p) with the canonical modulus x.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1, None)
    }

    fn least_irreducible(p: u64, k: u32) -> Result<Vec<u64>> {
        // Candidates (c_0,...,c_{k-1}) in lexicographic order, c_0 first.
        let count = p.pow(k);
        for code in 0..count {
            let mut poly = vec![0u64; k as usize + 1];
            let mut c = code;
            for i in (0..k as usize).rev() {
                poly[i] = c % p;
                c /= p;
            }
            poly[k as usize] = 1;
            if is_irreducible(&poly, p) {
                return Ok(poly);
            }
        }
        Err(Error::Internal(format!(
            "no monic irreducible of degree {k} over GF({p})"
        )))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Modulus polynomial coefficients, constant term first.
    pub fn poly(&self) -> &[u64] {
        &self.poly
    }

    pub fn element(&self, value: u64) -> Result<FieldElement> {
        if value < self.q {
            Ok(FieldElement(value))
        } else {
            Err(Error::InvalidElement {
                value,
                order: self.q,
            })
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    fn digits(&self, value: u64) -> Vec<u64> {
        let mut digits = vec![0u64; self.k as usize];
        let mut v = value;
        for d in digits.iter_mut() {
            *d = v % self.p;
            v /= self.p;
        }
        digits
    }

    fn from_digits(&self, digits: &[u64]) -> u64 {
        let mut value = 0;
        for &d in digits.iter().rev() {
            value = value * self.p + d;
        }
        value
    }

    pub(crate) fn add_raw(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let mut digits = self.digits(a);
        for (d, bd) in digits.iter_mut().zip(self.digits(b)) {
            *d = (*d + bd) % self.p;
        }
        self.from_digits(&digits)
    }

    pub(crate) fn neg_raw(&self, a: u64) -> u64 {
        if self.k == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let mut digits = self.digits(a);
        for d in digits.iter_mut() {
            *d = (self.p - *d) % self.p;
        }
        self.from_digits(&digits)
    }

    pub(crate) fn sub_raw(&self, a: u64, b: u64) -> u64 {
        self.add_raw(a, self.neg_raw(b))
    }

    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            return a * b % self.p;
        }
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * self.k as usize - 1];
        for (i, &ca) in da.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ca * cb) % self.p;
            }
        }
        let rem = poly_rem(&prod, &self.poly, self.p);
        self.from_digits(&rem)
    }

    pub(crate) fn pow_raw(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element; only for internal pivots that are known
    /// to be nonzero.
    pub(crate) fn inv_raw(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow_raw(a, self.q - 2)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add_raw(a.0, b.0))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.sub_raw(a.0, b.0))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg_raw(a.0))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul_raw(a.0, b.0))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        FieldElement(self.pow_raw(a.0, e))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement(self.inv_raw(a.0)))
    }
}

/// An element of a product ring, one coordinate per factor field.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RingElement {
    coords: Vec<FieldElement>,
}

impl RingElement {
    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> FieldElement {
        self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

#[derive(Serialize, Deserialize)]
struct ProductRingSpecRepr {
    factors: Vec<FieldSpec>,
}

/// K = GF(q_1) x ... x GF(q_m) (or F on the codomain side), with elements
/// enumerated in a fixed mixed-radix order: factor 1 is most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ProductRingSpecRepr", into = "ProductRingSpecRepr")]
pub struct ProductRingSpec {
    factors: Vec<FieldSpec>,
    order: u64,
}

impl From<ProductRingSpec> for ProductRingSpecRepr {
    fn from(spec: ProductRingSpec) -> Self {
        ProductRingSpecRepr {
            factors: spec.factors,
        }
    }
}

impl TryFrom<ProductRingSpecRepr> for ProductRingSpec {
    type Error = Error;

    fn try_from(repr: ProductRingSpecRepr) -> Result<Self> {
        ProductRingSpec::new(repr.factors)
    }
}

impl std::fmt::Display for ProductRingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl ProductRingSpec {
    pub fn new(factors: Vec<FieldSpec>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyProduct);
        }
        let mut order: u64 = 1;
        for f in &factors {
            order = order
                .checked_mul(f.q())
                .filter(|&o| o <= 1 << 32)
                .ok_or_else(|| Error::BadRange("product ring order too large".into()))?;
        }
        Ok(ProductRingSpec { factors, order })
    }

    pub fn single(field: FieldSpec) -> Self {
        let order = field.q();
        ProductRingSpec {
            factors: vec![field],
            order,
        }
    }

    pub fn factors(&self) -> &[FieldSpec] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn element(&self, coords: Vec<FieldElement>) -> Result<RingElement> {
        if coords.len() != self.factors.len() {
            return Err(Error::WrongLength {
                expected: self.factors.len(),
                got: coords.len(),
            });
        }
        for (c, f) in coords.iter().zip(&self.factors) {
            f.element(c.value())?;
        }
        Ok(RingElement { coords })
    }

    pub fn element_from_values(&self, values: &[u64]) -> Result<RingElement> {
        self.element(values.iter().map(|&v| FieldElement(v)).collect())
    }

    pub fn zero(&self) -> RingElement {
        RingElement {
            coords: vec![FieldElement(0); self.factors.len()],
        }
    }

    pub fn one(&self) -> RingElement {
        RingElement {
            coords: vec![FieldElement(1); self.factors.len()],
        }
    }

    /// Canonical code of an element: factor 1 most significant.
    pub fn index_of(&self, e: &RingElement) -> usize {
        let mut idx: u64 = 0;
        for (c, f) in e.coords.iter().zip(&self.factors) {
            idx = idx * f.q() + c.value();
        }
        idx as usize
    }

    pub fn element_of_index(&self, index: usize) -> RingElement {
        debug_assert!((index as u64) < self.order);
        let mut coords = vec![FieldElement(0); self.factors.len()];
        let mut idx = index as u64;
        for (c, f) in coords.iter_mut().zip(&self.factors).rev() {
            *c = FieldElement(idx % f.q());
            idx /= f.q();
        }
        RingElement { coords }
    }

    /// All elements in canonical index order.
    pub fn elements(&self) -> impl Iterator<Item = RingElement> + '_ {
        (0..self.order as usize).map(|i| self.element_of_index(i))
    }

    /// All elements with every coordinate nonzero, in canonical index order.
    pub fn units(&self) -> Vec<RingElement> {
        self.elements().filter(|e| !e.coords.iter().any(|c| c.is_zero())).collect()
    }

    fn zip_coords(
        &self,
        a: &RingElement,
        b: &RingElement,
        op: impl Fn(&FieldSpec, u64, u64) -> u64,
    ) -> Result<RingElement> {
        self.check_member(a)?;
        self.check_member(b)?;
        let coords = self
            .factors
            .iter()
            .zip(a.coords.iter().zip(&b.coords))
            .map(|(f, (x, y))| FieldElement(op(f, x.value(), y.value())))
            .collect();
        Ok(RingElement { coords })
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.zip_coords(a, b, |f, x, y| f.add_raw(x, y))
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.zip_coords(a, b, |f, x, y| f.mul_raw(x, y))
    }

    pub fn neg(&self, a: &RingElement) -> Result<RingElement> {
        self.check_member(a)?;
        let coords = self
            .factors
            .iter()
            .zip(&a.coords)
            .map(|(f, x)| FieldElement(f.neg_raw(x.value())))
            .collect();
        Ok(RingElement { coords })
    }

    pub fn check_member(&self, e: &RingElement) -> Result<()> {
        if e.coords.len() != self.factors.len() {
            return Err(Error::WrongLength {
                expected: self.factors.len(),
                got: e.coords.len(),
            });
        }
        for (c, f) in e.coords.iter().zip(&self.factors) {
            f.element(c.value())?;
        }
        Ok(())
    }

    /// Componentwise product by element index; hot path of the monoid action.
    pub(crate) fn mul_index(&self, a: usize, b: usize) -> usize {
        let ea = self.element_of_index(a);
        let eb = self.element_of_index(b);
        let mut idx: u64 = 0;
        for ((x, y), f) in ea.coords.iter().zip(&eb.coords).zip(&self.factors) {
            idx = idx * f.q() + f.mul_raw(x.value(), y.value());
        }
        idx as usize
    }
}

/// True iff |K| and |F| are coprime — the standing hypothesis of every
/// theorem-level operation in `clonoid` and `modlattice`.
pub fn coprimality_check(k: &ProductRingSpec, f: &ProductRingSpec) -> bool {
    gcd(k.order(), f.order()) == 1
}

pub fn ensure_coprime(k: &ProductRingSpec, f: &ProductRingSpec) -> Result<()> {
    if coprimality_check(k, f) {
        Ok(())
    } else {
        Err(Error::NotCoprime {
            k_order: k.order(),
            f_order: f.order(),
        })
    }
}
