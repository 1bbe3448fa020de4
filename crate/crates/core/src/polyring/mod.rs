//! Arithmetic in `Z_q[x]/(x^256 + 1)`.
//!
//! Two backends compute bit-identical results: a scalar reference and a
//! 32-lane AVX-512 path. They differ only in where NTT-domain coefficients
//! are stored, which [`NttPoly`] records and normalizes on comparison.

mod layout;
mod scalar;
pub mod tables;

#[cfg(target_arch = "x86_64")]
mod avx512;

use std::sync::atomic::{AtomicU8, Ordering};

use crate::error::{Error, Result};
use crate::params::{N, Q};
use tables::{Twiddle, BARRETT_V, QINV};

pub use scalar::shadow;

/// Signed Barrett reduction with `v = 20159`: the high half of `a * v`,
/// shifted right by 10, times `q`, subtracted from `a`. Output lies in
/// `[0, q]` and is congruent to `a`.
#[inline(always)]
pub fn barrett_reduce(a: i16) -> i16 {
    let t = ((a as i32 * BARRETT_V as i32) >> 16) as i16;
    let t = t >> 10;
    a.wrapping_sub(t.wrapping_mul(Q))
}

/// Signed Montgomery reduction: for `|a| < q * 2^15` returns `a * 2^-16 mod q`
/// in `(-q, q)`.
#[inline(always)]
pub fn montgomery_reduce(a: i32) -> i16 {
    let t = (a as i16).wrapping_mul(QINV);
    ((a - t as i32 * Q as i32) >> 16) as i16
}

#[inline(always)]
pub(crate) fn fqmul(a: i16, b: i16) -> i16 {
    montgomery_reduce(a as i32 * b as i32)
}

/// Same result as `fqmul(x, z.hi)`, computed from the two high halves the
/// way the vector path does.
#[inline(always)]
pub(crate) fn fqmul_twiddle(x: i16, z: Twiddle) -> i16 {
    let t = x.wrapping_mul(z.lo);
    let h = ((x as i32 * z.hi as i32) >> 16) as i16;
    let tq = ((t as i32 * Q as i32) >> 16) as i16;
    h.wrapping_sub(tq)
}

/// Maps a coefficient in `(-2^15, 2^15)` to `[0, q)`.
#[inline(always)]
pub fn canonical(a: i16) -> i16 {
    let r = barrett_reduce(a);
    // Barrett leaves exactly q for negative multiples of q
    r - (Q & -((r >= Q) as i16))
}

/// A ring element in coefficient form.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Poly {
    pub coeffs: [i16; N],
}

impl Default for Poly {
    fn default() -> Self {
        Poly::zero()
    }
}

impl core::fmt::Debug for Poly {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Poly({:?}..)", &self.coeffs[..8])
    }
}

impl Poly {
    pub const fn zero() -> Self {
        Poly { coeffs: [0; N] }
    }

    pub fn from_coeffs(coeffs: [i16; N]) -> Self {
        Poly { coeffs }
    }

    /// Every coefficient mapped to `[0, q)`.
    pub fn canonical(&self) -> Poly {
        let mut p = *self;
        for c in p.coeffs.iter_mut() {
            *c = canonical(*c);
        }
        p
    }

    /// Coefficient-wise congruence modulo `q`.
    pub fn congruent(&self, other: &Poly) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Where the coefficients of an [`NttPoly`] live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NttLayout {
    /// `[2r]`, `[2r + 1]` hold residue `r` in bit-reversed order.
    BitReversed,
    /// Storage order of the 32-lane backend.
    Lanes32,
}

/// A ring element as 128 degree-1 residues.
#[derive(Clone, Copy)]
pub struct NttPoly {
    coeffs: [i16; N],
    layout: NttLayout,
}

impl NttPoly {
    pub fn zero(layout: NttLayout) -> Self {
        NttPoly { coeffs: [0; N], layout }
    }

    pub fn from_bit_reversed(coeffs: [i16; N]) -> Self {
        NttPoly {
            coeffs,
            layout: NttLayout::BitReversed,
        }
    }

    pub fn layout(&self) -> NttLayout {
        self.layout
    }

    /// Raw storage, in this value's layout.
    pub fn raw(&self) -> &[i16; N] {
        &self.coeffs
    }

    /// Coefficients in bit-reversed residue order, whatever the layout.
    pub fn to_bit_reversed(&self) -> [i16; N] {
        match self.layout {
            NttLayout::BitReversed => self.coeffs,
            NttLayout::Lanes32 => layout::to_scalar(&self.coeffs),
        }
    }

    pub fn with_layout(&self, target: NttLayout) -> NttPoly {
        if self.layout == target {
            return *self;
        }
        let coeffs = match target {
            NttLayout::BitReversed => layout::to_scalar(&self.coeffs),
            NttLayout::Lanes32 => layout::to_storage(&self.coeffs),
        };
        NttPoly { coeffs, layout: target }
    }

    /// Residue `r` as `(constant, linear)` coefficients.
    pub fn residue(&self, r: usize) -> (i16, i16) {
        let c = self.to_bit_reversed();
        (c[2 * r], c[2 * r + 1])
    }

    pub fn canonical(&self) -> NttPoly {
        let mut p = *self;
        for c in p.coeffs.iter_mut() {
            *c = canonical(*c);
        }
        p
    }
}

impl PartialEq for NttPoly {
    fn eq(&self, other: &Self) -> bool {
        self.to_bit_reversed() == other.to_bit_reversed()
    }
}

impl Eq for NttPoly {}

impl core::fmt::Debug for NttPoly {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "NttPoly({:?}, {:?}..)", self.layout, &self.to_bit_reversed()[..8])
    }
}

/// Coefficient-wise operations offered by [`Backend::poly_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Reduce,
    ToMont,
    FromMont,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Scalar,
    Vector,
}

/// Selected arithmetic backend. A vector backend can only be obtained on a
/// CPU that supports it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Backend(Kind);

const DEFAULT_UNSET: u8 = 0;
const DEFAULT_SCALAR: u8 = 1;
const DEFAULT_VECTOR: u8 = 2;

static DEFAULT: AtomicU8 = AtomicU8::new(DEFAULT_UNSET);

impl Backend {
    pub const fn scalar() -> Backend {
        Backend(Kind::Scalar)
    }

    pub fn vector_supported() -> bool {
        #[cfg(target_arch = "x86_64")]
        {
            std::arch::is_x86_feature_detected!("avx512f")
                && std::arch::is_x86_feature_detected!("avx512bw")
        }
        #[cfg(not(target_arch = "x86_64"))]
        {
            false
        }
    }

    pub fn vector() -> Result<Backend> {
        if Self::vector_supported() {
            Ok(Backend(Kind::Vector))
        } else {
            Err(Error::BackendUnavailable("this CPU lacks AVX-512F/BW"))
        }
    }

    /// The widest backend this CPU supports.
    pub fn detect() -> Backend {
        Self::vector().unwrap_or(Self::scalar())
    }

    /// Parses `scalar`, `vector` or `auto`.
    pub fn from_name(name: &str) -> Result<Backend> {
        match name.to_ascii_lowercase().as_str() {
            "scalar" => Ok(Self::scalar()),
            "vector" | "avx512" => Self::vector(),
            "auto" => Ok(Self::detect()),
            other => Err(Error::InvalidParameter(format!("unknown backend `{other}`"))),
        }
    }

    /// Process-wide default: set by [`Backend::set_default`], else the
    /// `PQKEM_BACKEND` environment variable, else detection.
    pub fn current() -> Backend {
        match DEFAULT.load(Ordering::Relaxed) {
            DEFAULT_SCALAR => Self::scalar(),
            DEFAULT_VECTOR => Backend(Kind::Vector),
            _ => {
                let b = std::env::var("PQKEM_BACKEND")
                    .ok()
                    .and_then(|v| Self::from_name(&v).ok())
                    .unwrap_or_else(Self::detect);
                Self::set_default(b);
                b
            }
        }
    }

    pub fn set_default(b: Backend) {
        let v = if b.is_vector() { DEFAULT_VECTOR } else { DEFAULT_SCALAR };
        DEFAULT.store(v, Ordering::Relaxed);
    }

    pub fn is_vector(self) -> bool {
        self.0 == Kind::Vector
    }

    pub fn name(self) -> &'static str {
        match self.0 {
            Kind::Scalar => "scalar",
            Kind::Vector => "vector",
        }
    }

    /// Layout this backend produces and consumes in the NTT domain.
    pub fn ntt_layout(self) -> NttLayout {
        match self.0 {
            Kind::Scalar => NttLayout::BitReversed,
            Kind::Vector => NttLayout::Lanes32,
        }
    }

    /// Forward transform. Input coefficients must satisfy `|c| < q`; outputs
    /// stay below `8q` in magnitude.
    pub fn ntt(self, f: &Poly) -> NttPoly {
        let mut c = f.coeffs;
        match self.0 {
            Kind::Scalar => scalar::ntt(&mut c),
            #[cfg(target_arch = "x86_64")]
            // SAFETY: a vector backend exists only after feature detection.
            Kind::Vector => unsafe { avx512::ntt(&mut c) },
            #[cfg(not(target_arch = "x86_64"))]
            Kind::Vector => unreachable!(),
        }
        NttPoly {
            coeffs: c,
            layout: self.ntt_layout(),
        }
    }

    /// Inverse transform, including the division by 128. Accepts any
    /// 16-bit coefficients; outputs satisfy `|c| < q`.
    pub fn intt(self, fhat: &NttPoly) -> Poly {
        let mut c = fhat.with_layout(self.ntt_layout()).coeffs;
        match self.0 {
            Kind::Scalar => scalar::intt(&mut c),
            #[cfg(target_arch = "x86_64")]
            // SAFETY: as above.
            Kind::Vector => unsafe { avx512::intt(&mut c) },
            #[cfg(not(target_arch = "x86_64"))]
            Kind::Vector => unreachable!(),
        }
        Poly { coeffs: c }
    }

    /// Residue-wise product; the result is the plain (not Montgomery-scaled)
    /// product, with coefficients below `q` in magnitude. Inputs must stay
    /// below `8q` in magnitude.
    pub fn basemul(self, a: &NttPoly, b: &NttPoly) -> NttPoly {
        let l = self.ntt_layout();
        let a = a.with_layout(l);
        let b = b.with_layout(l);
        let mut out = NttPoly::zero(l);
        match self.0 {
            Kind::Scalar => scalar::basemul(&mut out.coeffs, &a.coeffs, &b.coeffs),
            #[cfg(target_arch = "x86_64")]
            // SAFETY: as above.
            Kind::Vector => unsafe { avx512::basemul(&mut out.coeffs, &a.coeffs, &b.coeffs) },
            #[cfg(not(target_arch = "x86_64"))]
            Kind::Vector => unreachable!(),
        }
        out
    }

    /// `a * b` in the ring, through the NTT.
    pub fn ring_mul(self, a: &Poly, b: &Poly) -> Poly {
        self.intt(&self.basemul(&self.ntt(a), &self.ntt(b)))
    }

    /// Coefficient-wise arithmetic on raw coefficient arrays. `Add` and `Sub`
    /// need `b`; the rest ignore it.
    pub fn poly_arith(self, op: PolyOp, a: &[i16; N], b: Option<&[i16; N]>) -> Result<[i16; N]> {
        let mut out = *a;
        let need_b = || {
            b.ok_or_else(|| Error::InvalidArgument(format!("{op:?} needs a second operand")))
        };
        match (self.0, op) {
            (Kind::Scalar, PolyOp::Add) => scalar::add(&mut out, a, need_b()?),
            (Kind::Scalar, PolyOp::Sub) => scalar::sub(&mut out, a, need_b()?),
            (Kind::Scalar, PolyOp::Reduce) => scalar::reduce(&mut out),
            (Kind::Scalar, PolyOp::ToMont) => scalar::to_mont(&mut out),
            (Kind::Scalar, PolyOp::FromMont) => scalar::from_mont(&mut out),
            #[cfg(target_arch = "x86_64")]
            // SAFETY: as above.
            (Kind::Vector, op) => unsafe {
                match op {
                    PolyOp::Add => avx512::add(&mut out, a, need_b()?),
                    PolyOp::Sub => avx512::sub(&mut out, a, need_b()?),
                    PolyOp::Reduce => avx512::reduce(&mut out),
                    PolyOp::ToMont => avx512::to_mont(&mut out),
                    PolyOp::FromMont => avx512::from_mont(&mut out),
                }
            },
            #[cfg(not(target_arch = "x86_64"))]
            (Kind::Vector, _) => unreachable!(),
        }
        Ok(out)
    }

    pub fn add(self, a: &Poly, b: &Poly) -> Poly {
        Poly {
            coeffs: self.arith2(PolyOp::Add, &a.coeffs, &b.coeffs),
        }
    }

    pub fn sub(self, a: &Poly, b: &Poly) -> Poly {
        Poly {
            coeffs: self.arith2(PolyOp::Sub, &a.coeffs, &b.coeffs),
        }
    }

    pub fn reduce(self, a: &Poly) -> Poly {
        Poly {
            coeffs: self.arith1(PolyOp::Reduce, &a.coeffs),
        }
    }

    /// NTT-domain addition; both operands are brought to this backend's layout.
    pub fn ntt_add(self, a: &NttPoly, b: &NttPoly) -> NttPoly {
        let l = self.ntt_layout();
        NttPoly {
            coeffs: self.arith2(PolyOp::Add, &a.with_layout(l).coeffs, &b.with_layout(l).coeffs),
            layout: l,
        }
    }

    pub fn ntt_reduce(self, a: &NttPoly) -> NttPoly {
        NttPoly {
            coeffs: self.arith1(PolyOp::Reduce, &a.coeffs),
            layout: a.layout,
        }
    }

    fn arith1(self, op: PolyOp, a: &[i16; N]) -> [i16; N] {
        self.poly_arith(op, a, None).expect("unary op")
    }

    fn arith2(self, op: PolyOp, a: &[i16; N], b: &[i16; N]) -> [i16; N] {
        self.poly_arith(op, a, Some(b)).expect("binary op has both operands")
    }
}

impl Default for Backend {
    fn default() -> Self {
        Backend::current()
    }
}

#[cfg(test)]
mod tests;
