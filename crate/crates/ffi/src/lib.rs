//! C interface to `torus-plasma`.
//!
//! Every function returns a [`TpStatus`] and writes its result through an out
//! pointer. Handles are created by `tp_*_new` and released by `tp_*_free`.
//! Panics never cross the boundary; they surface as `TP_STATUS_PANIC`.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use num_complex::Complex64;
use torus_plasma::coulomb::{self, TorusGeometry};
use torus_plasma::{identities, ocp, qtheta, tcg, universality, Error, Nome};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpStatus {
    Ok = 0,
    NullPointer = 1,
    NomeOutOfRange = 2,
    PrecisionUnreachable = 3,
    DimensionMismatch = 4,
    SingularConfiguration = 5,
    CoincidentPoints = 6,
    SingularSeparation = 7,
    DegenerateGeometry = 8,
    InvalidGeometry = 9,
    FluxMismatch = 10,
    QuadratureNonConvergence = 11,
    SeedRequired = 12,
    InsufficientSamples = 13,
    JumpPoint = 14,
    GridTooCoarse = 15,
    TruncationInsufficient = 16,
    FitIllConditioned = 17,
    InvalidArgument = 18,
    Panic = 99,
}

impl From<&Error> for TpStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NomeOutOfRange(_) => Self::NomeOutOfRange,
            Error::PrecisionUnreachable { .. } => Self::PrecisionUnreachable,
            Error::DimensionMismatch { .. } => Self::DimensionMismatch,
            Error::SingularConfiguration(_) => Self::SingularConfiguration,
            Error::CoincidentPoints => Self::CoincidentPoints,
            Error::SingularSeparation => Self::SingularSeparation,
            Error::DegenerateGeometry(_) => Self::DegenerateGeometry,
            Error::InvalidGeometry(_) => Self::InvalidGeometry,
            Error::FluxMismatch { .. } => Self::FluxMismatch,
            Error::QuadratureNonConvergence { .. } => Self::QuadratureNonConvergence,
            Error::SeedRequired => Self::SeedRequired,
            Error::InsufficientSamples { .. } => Self::InsufficientSamples,
            Error::JumpPoint => Self::JumpPoint,
            Error::GridTooCoarse { .. } => Self::GridTooCoarse,
            Error::TruncationInsufficient(_) => Self::TruncationInsufficient,
            Error::FitIllConditioned(_) => Self::FitIllConditioned,
            Error::InvalidArgument(_) => Self::InvalidArgument,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TpComplex {
    pub re: f64,
    pub im: f64,
}

impl From<TpComplex> for Complex64 {
    fn from(z: TpComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for TpComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// `beta F = bulk + surface + casimir`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TpFreeEnergy {
    pub bulk: f64,
    pub surface: f64,
    pub casimir: f64,
    pub total: f64,
}

/// `O(1)` terms of the log partition functions and their reconciliation.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TpCasimir {
    pub ocp_term: f64,
    pub ocp_term_lw: f64,
    pub tcg_term: f64,
    pub gff_term: f64,
    pub modular_shift: f64,
    pub reconciliation_residual: f64,
}

/// Monte Carlo estimate of the configuration integral against its closed form.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TpPartitionCheck {
    pub value: f64,
    pub std_error: f64,
    pub closed_form: f64,
    pub sigmas: f64,
}

/// Opaque nome handle.
pub struct TpNome(Nome);

/// Opaque torus handle.
pub struct TpGeometry(TorusGeometry);

fn guard(f: impl FnOnce() -> Result<(), TpStatus>) -> TpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TpStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => TpStatus::Panic,
    }
}

fn lift<T>(r: torus_plasma::Result<T>) -> Result<T, TpStatus> {
    r.map_err(|e| TpStatus::from(&e))
}

/// # Safety
/// `p` must be null or valid for reads.
unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, TpStatus> {
    p.as_ref().ok_or(TpStatus::NullPointer)
}

/// # Safety
/// `p` must be null or valid for writes.
unsafe fn put<T>(p: *mut T, v: T) -> Result<(), TpStatus> {
    if p.is_null() {
        return Err(TpStatus::NullPointer);
    }
    p.write(v);
    Ok(())
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn tp_status_message(status: TpStatus) -> *const c_char {
    let s: &'static CStr = match status {
        TpStatus::Ok => c"ok",
        TpStatus::NullPointer => c"null pointer argument",
        TpStatus::NomeOutOfRange => c"nome out of range",
        TpStatus::PrecisionUnreachable => c"series precision unreachable",
        TpStatus::DimensionMismatch => c"dimension mismatch",
        TpStatus::SingularConfiguration => c"singular configuration",
        TpStatus::CoincidentPoints => c"coincident points",
        TpStatus::SingularSeparation => c"kernel evaluated on its pole",
        TpStatus::DegenerateGeometry => c"degenerate geometry",
        TpStatus::InvalidGeometry => c"invalid geometry",
        TpStatus::FluxMismatch => c"flux mismatch",
        TpStatus::QuadratureNonConvergence => c"quadrature did not converge",
        TpStatus::SeedRequired => c"seed required",
        TpStatus::InsufficientSamples => c"insufficient samples",
        TpStatus::JumpPoint => c"evaluated at a jump point",
        TpStatus::GridTooCoarse => c"grid too coarse",
        TpStatus::TruncationInsufficient => c"mode truncation insufficient",
        TpStatus::FitIllConditioned => c"ill-conditioned fit",
        TpStatus::InvalidArgument => c"invalid argument",
        TpStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Real nome `0 <= q <= 0.95`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_nome_new_real(q: f64, out: *mut *mut TpNome) -> TpStatus {
    guard(|| {
        let nome = lift(Nome::real(q))?;
        put(out, Box::into_raw(Box::new(TpNome(nome))))
    })
}

/// Nome from the half-period ratio `tau`, `Im tau > 0`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_nome_new_tau(tau: TpComplex, out: *mut *mut TpNome) -> TpStatus {
    guard(|| {
        let nome = lift(Nome::from_tau(tau.into()))?;
        put(out, Box::into_raw(Box::new(TpNome(nome))))
    })
}

/// # Safety
/// `nome` must be null or a handle from `tp_nome_new_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tp_nome_free(nome: *mut TpNome) {
    if !nome.is_null() {
        drop(Box::from_raw(nome));
    }
}

/// `theta1(z; q)`.
///
/// # Safety
/// `nome` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_theta1(nome: *const TpNome, z: TpComplex, out: *mut TpComplex) -> TpStatus {
    guard(|| {
        let v = lift(qtheta::theta1(z.into(), &get(nome)?.0))?;
        put(out, v.into())
    })
}

/// `theta3(z; q)`.
///
/// # Safety
/// `nome` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_theta3(nome: *const TpNome, z: TpComplex, out: *mut TpComplex) -> TpStatus {
    guard(|| {
        let v = lift(qtheta::theta3(z.into(), &get(nome)?.0))?;
        put(out, v.into())
    })
}

/// `theta4(z; q)`.
///
/// # Safety
/// `nome` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_theta4(nome: *const TpNome, z: TpComplex, out: *mut TpComplex) -> TpStatus {
    guard(|| {
        let v = lift(qtheta::theta4(z.into(), &get(nome)?.0))?;
        put(out, v.into())
    })
}

/// `q^{1/12} prod (1 - q^{2k})` for real `0 < q < 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_eta_q(q: f64, out: *mut f64) -> TpStatus {
    guard(|| put(out, lift(qtheta::eta_q(q))?))
}

/// Relative residual of the theta-Vandermonde identity at points `xs[0..n]`.
///
/// # Safety
/// `nome` must be a live handle, `xs` valid for `n` reads, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_theta_vandermonde_residual(
    nome: *const TpNome,
    xs: *const TpComplex,
    n: usize,
    alpha: TpComplex,
    out: *mut f64,
) -> TpStatus {
    guard(|| {
        if xs.is_null() {
            return Err(TpStatus::NullPointer);
        }
        let pts: Vec<Complex64> = slice::from_raw_parts(xs, n).iter().map(|&z| z.into()).collect();
        let r = lift(identities::theta_vandermonde_residual(
            &pts,
            alpha.into(),
            &get(nome)?.0,
            n,
        ))?;
        put(out, r.rel_residual)
    })
}

/// Rectangle `L x W` holding `n` particles.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_geometry_new(length: f64, width: f64, n: usize, out: *mut *mut TpGeometry) -> TpStatus {
    guard(|| {
        let g = lift(TorusGeometry::new(length, width, n))?;
        put(out, Box::into_raw(Box::new(TpGeometry(g))))
    })
}

/// # Safety
/// `geom` must be null or a handle from `tp_geometry_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tp_geometry_free(geom: *mut TpGeometry) {
    if !geom.is_null() {
        drop(Box::from_raw(geom));
    }
}

/// Doubly periodic potential at `z` of a unit charge at `zp`.
///
/// # Safety
/// `geom` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_phi_periodic(
    geom: *const TpGeometry,
    z: TpComplex,
    zp: TpComplex,
    out: *mut f64,
) -> TpStatus {
    guard(|| put(out, lift(coulomb::phi_periodic(z.into(), zp.into(), &get(geom)?.0))?))
}

/// Potential periodic in `x` only.
///
/// # Safety
/// `geom` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_phi_quasi(geom: *const TpGeometry, z: TpComplex, zp: TpComplex, out: *mut f64) -> TpStatus {
    guard(|| put(out, lift(coulomb::phi_quasi(z.into(), zp.into(), &get(geom)?.0))?))
}

/// `log Z_N` of the plasma at coupling 2.
///
/// # Safety
/// `geom` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_ocp_log_partition(geom: *const TpGeometry, out: *mut f64) -> TpStatus {
    guard(|| put(out, lift(ocp::log_zn_middle(&get(geom)?.0))?))
}

/// # Safety
/// `geom` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_ocp_free_energy(geom: *const TpGeometry, out: *mut TpFreeEnergy) -> TpStatus {
    guard(|| {
        let f = lift(ocp::free_energy(&get(geom)?.0))?;
        put(
            out,
            TpFreeEnergy {
                bulk: f.bulk,
                surface: f.surface,
                casimir: f.casimir,
                total: f.total,
            },
        )
    })
}

/// Monte Carlo check of the configuration integral for `N = 2, 3`.
///
/// # Safety
/// `geom` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_ocp_verify_mc(
    geom: *const TpGeometry,
    samples: usize,
    seed: u64,
    out: *mut TpPartitionCheck,
) -> TpStatus {
    guard(|| {
        let c = lift(ocp::verify_partition_mc(&get(geom)?.0, samples, Some(seed)))?;
        put(
            out,
            TpPartitionCheck {
                value: c.estimate.value,
                std_error: c.estimate.std_error,
                closed_form: c.closed_form,
                sigmas: c.sigmas,
            },
        )
    })
}

/// `log Xi_2` of the Coulomb gas at fugacity `zeta`, keeping `n_max` paired modes.
///
/// # Safety
/// `geom` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_tcg_log_grand_partition(
    geom: *const TpGeometry,
    zeta: f64,
    n_max: usize,
    out: *mut f64,
) -> TpStatus {
    guard(|| put(out, lift(tcg::log_xi2_closed(zeta, &get(geom)?.0, n_max))?))
}

/// `2 log eta_q(q)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_gff_constant(q: f64, out: *mut f64) -> TpStatus {
    guard(|| put(out, lift(universality::gff_constant(q))?))
}

/// # Safety
/// `geom` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tp_casimir_report(geom: *const TpGeometry, zeta: f64, out: *mut TpCasimir) -> TpStatus {
    guard(|| {
        let r = lift(universality::casimir_report(&get(geom)?.0, zeta))?;
        put(
            out,
            TpCasimir {
                ocp_term: r.ocp_term,
                ocp_term_lw: r.ocp_term_lw,
                tcg_term: r.tcg_term,
                gff_term: r.gff_term,
                modular_shift: r.modular_shift,
                reconciliation_residual: r.discrepancies.reconciliation_residual,
            },
        )
    })
}
