//! Moiré lattice conventions.
//!
//! Positions live in `Λ = (4/3)πiω(ℤ ⊕ ωℤ)`, momenta in the dual lattice
//! `Λ* = √3ω(ℤ ⊕ ωℤ)`, and the two are paired by `⟨z,w⟩ = Re(z w̄)`.

use num_complex::Complex64;
use std::f64::consts::PI;

pub type C64 = Complex64;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Tolerance used when snapping a complex number onto a lattice.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The cube root of unity `e^{2πi/3}`.
#[inline]
pub fn omega() -> C64 {
    c64(-0.5, 0.5 * SQRT3)
}

/// Integer power of ω, reduced mod 3.
#[inline]
pub fn omega_pow(k: i64) -> C64 {
    match k.rem_euclid(3) {
        0 => c64(1.0, 0.0),
        1 => omega(),
        _ => omega().conj(),
    }
}

/// Real pairing `½(z w̄ + z̄ w)`.
#[inline]
pub fn pairing(z: C64, w: C64) -> f64 {
    z.re * w.re + z.im * w.im
}

#[inline]
fn lattice_scale() -> C64 {
    c64(0.0, 4.0 * PI / 3.0) * omega()
}

/// `(4/3)πiω(a₁ + ωa₂)`.
pub fn lattice_point(a1: i64, a2: i64) -> C64 {
    lattice_scale() * (c64(a1 as f64, 0.0) + omega() * a2 as f64)
}

/// `√3ω(m + ωn)`.
pub fn dual_point(m: i64, n: i64) -> C64 {
    omega() * SQRT3 * (c64(m as f64, 0.0) + omega() * n as f64)
}

/// `ω(ωk₁ − k₂)/√3`; the square `[0,3)²` covers `ℂ/Λ*`.
pub fn k_from_fractional(k1: f64, k2: f64) -> C64 {
    omega() * (omega() * k1 - k2) / SQRT3
}

/// Inverse of [`k_from_fractional`].
pub fn fractional_from_k(k: C64) -> (f64, f64) {
    let w = k * SQRT3 * omega().conj();
    let k1 = 2.0 * w.im / SQRT3;
    let k2 = -0.5 * k1 - w.re;
    (k1, k2)
}

/// Point `s₁f₁ + s₂f₂` of the dual cell, with `f₁ = √3ω`, `f₂ = √3ω²`.
pub fn dual_fractional(s1: f64, s2: f64) -> C64 {
    dual_point(1, 0) * s1 + dual_point(0, 1) * s2
}

/// Solve `x = u + ωv` for real `(u, v)`.
fn omega_coords(x: C64) -> (f64, f64) {
    let v = 2.0 * x.im / SQRT3;
    (x.re + 0.5 * v, v)
}

fn snap(u: f64, v: f64) -> Option<(i64, i64)> {
    let (ru, rv) = (u.round(), v.round());
    if (u - ru).abs() <= MEMBERSHIP_TOL && (v - rv).abs() <= MEMBERSHIP_TOL {
        Some((ru as i64, rv as i64))
    } else {
        None
    }
}

/// Index-level rotation `x ↦ ωx` on `ℤ ⊕ ωℤ`.
#[inline]
fn rotate_coords(a: i64, b: i64) -> (i64, i64) {
    (-b, a - b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeIndex {
    pub a1: i64,
    pub a2: i64,
}

impl LatticeIndex {
    pub const fn new(a1: i64, a2: i64) -> Self {
        Self { a1, a2 }
    }

    pub fn point(self) -> C64 {
        lattice_point(self.a1, self.a2)
    }

    /// Returns the index of `z` if it lies on Λ.
    pub fn nearest(z: C64) -> Option<Self> {
        let (u, v) = omega_coords(z / lattice_scale());
        snap(u, v).map(|(a1, a2)| Self { a1, a2 })
    }

    /// Index of `ω·a`.
    pub fn rotated(self) -> Self {
        let (a1, a2) = rotate_coords(self.a1, self.a2);
        Self { a1, a2 }
    }
}

impl std::ops::Add for LatticeIndex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a1 + o.a1, self.a2 + o.a2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualIndex {
    pub m: i64,
    pub n: i64,
}

impl DualIndex {
    pub const fn new(m: i64, n: i64) -> Self {
        Self { m, n }
    }

    pub fn point(self) -> C64 {
        dual_point(self.m, self.n)
    }

    /// Returns the index of `p` if it lies on Λ*.
    pub fn nearest(p: C64) -> Option<Self> {
        let (u, v) = omega_coords(p / (omega() * SQRT3));
        snap(u, v).map(|(m, n)| Self { m, n })
    }

    /// Index of `ω·p`.
    pub fn rotated(self) -> Self {
        let (m, n) = rotate_coords(self.m, self.n);
        Self { m, n }
    }
}

impl std::ops::Add for DualIndex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.m + o.m, self.n + o.n)
    }
}

impl std::ops::Sub for DualIndex {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.m - o.m, self.n - o.n)
    }
}

impl std::ops::Neg for DualIndex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.m, -self.n)
    }
}

/// Distance from `k` to the nearest point of `Λ* + shift`.
pub fn distance_to_dual_coset(k: C64, shift: C64) -> f64 {
    let (u, v) = omega_coords((k - shift) / (omega() * SQRT3));
    let mut best = f64::INFINITY;
    for du in -1..=1 {
        for dv in -1..=1 {
            let p = dual_point(u.round() as i64 + du, v.round() as i64 + dv);
            best = best.min((k - shift - p).norm());
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoireGeometry {
    pub omega: C64,
    pub e1: C64,
    pub e2: C64,
    pub f1: C64,
    pub f2: C64,
    pub k: C64,
    pub k_prime: C64,
    pub z_s: C64,
    pub cell_area: f64,
}

impl MoireGeometry {
    pub fn standard() -> Self {
        let e1 = lattice_point(1, 0);
        let e2 = lattice_point(0, 1);
        Self {
            omega: omega(),
            e1,
            e2,
            f1: dual_point(1, 0),
            f2: dual_point(0, 1),
            k: c64(0.0, 0.0),
            k_prime: c64(0.0, -1.0),
            z_s: stacking_point(),
            cell_area: (e1.conj() * e2).im.abs(),
        }
    }
}

/// `z_S = (1/3)·(4/3)πiω(−1 + ω)`.
pub fn stacking_point() -> C64 {
    lattice_scale() * (omega() - 1.0) / 3.0
}

/// Area of the fundamental cell of `ℂ/Λ`, `8π²√3/9`.
pub fn cell_area() -> f64 {
    8.0 * PI * PI * SQRT3 / 9.0
}
