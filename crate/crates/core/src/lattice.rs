//! Lattice geometry, physical constants, detectors and the initial many-body
//! states that are released from the lattice.
//!
//! Sites are ordered row-major with `x` fastest: the site at grid index
//! `(ix, iy, iz)` has linear index `ix + nx * (iy + ny * iz)`. All correlation
//! matrices in this crate use that ordering.

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Mass, Planck constant, gravitational acceleration and on-site Wannier width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// kg
    pub mass: f64,
    /// J s
    pub hbar: f64,
    /// m / s^2
    pub g: f64,
    /// Width of the Gaussian on-site orbital, m.
    pub wannier_width: f64,
}

impl PhysicalParams {
    pub const RB87_MASS: f64 = 1.443e-25;
    pub const HBAR: f64 = 1.0546e-34;
    pub const G: f64 = 9.81;
    /// Chosen so that the expanded width at z0 = 1 cm is 0.8 mm.
    pub const DEFAULT_WANNIER_WIDTH: f64 = 41.3e-9;

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("hbar", self.hbar),
            ("g", self.g),
            ("wannier_width", self.wannier_width),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("{name} must be finite and positive, got {v}"));
            }
        }
        Ok(())
    }

    /// Orbitals on neighbouring sites must not overlap.
    pub fn validate_against(&self, geometry: &LatticeGeometry) -> Result<()> {
        self.validate()?;
        if geometry.site_count() > 1 && self.wannier_width >= geometry.spacing / 4.0 {
            return domain(format!(
                "wannier width {} m is not below a quarter of the spacing {} m",
                self.wannier_width, geometry.spacing
            ));
        }
        Ok(())
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            mass: Self::RB87_MASS,
            hbar: Self::HBAR,
            g: Self::G,
            wannier_width: Self::DEFAULT_WANNIER_WIDTH,
        }
    }
}

/// Rectangular lattice centred on the coordinate origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeGeometry {
    pub dims: [usize; 3],
    /// m
    pub spacing: f64,
}

impl LatticeGeometry {
    pub const DEFAULT_SPACING: f64 = 0.5e-6;

    pub fn new(dims: [usize; 3], spacing: f64) -> Result<Self> {
        if dims.iter().any(|&n| n == 0) {
            return domain(format!("lattice dimensions must be positive, got {dims:?}"));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return domain(format!("lattice spacing must be positive, got {spacing}"));
        }
        Ok(Self { dims, spacing })
    }

    /// One-dimensional chain along `x`.
    pub fn chain(n: usize, spacing: f64) -> Result<Self> {
        Self::new([n, 1, 1], spacing)
    }

    /// One-dimensional chain along the fall direction `z`.
    pub fn vertical_chain(n: usize, spacing: f64) -> Result<Self> {
        Self::new([1, 1, n], spacing)
    }

    pub fn site_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// Number of axes with more than one site.
    pub fn dimensionality(&self) -> usize {
        self.dims.iter().filter(|&&n| n > 1).count()
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.dims[0] * (iy + self.dims[1] * iz)
    }

    pub fn grid_index(&self, site: usize) -> [usize; 3] {
        let [nx, ny, _] = self.dims;
        [site % nx, (site / nx) % ny, site / (nx * ny)]
    }

    /// Site positions in metres, `x` fastest.
    pub fn site_positions(&self) -> Vec<[f64; 3]> {
        let coord = |i: usize, n: usize| (i as f64 - (n as f64 - 1.0) / 2.0) * self.spacing;
        let [nx, ny, nz] = self.dims;
        let mut out = Vec::with_capacity(self.site_count());
        for iz in 0..nz {
            for iy in 0..ny {
                for ix in 0..nx {
                    out.push([coord(ix, nx), coord(iy, ny), coord(iz, nz)]);
                }
            }
        }
        out
    }

    /// Linear index of the sites of a one-dimensional geometry in chain order,
    /// or `None` if more than one axis is extended.
    pub fn chain_axis(&self) -> Option<usize> {
        match self.dimensionality() {
            0 => Some(0),
            1 => self.dims.iter().position(|&n| n > 1),
            _ => None,
        }
    }
}

/// Axis-aligned box detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorBox {
    /// Centre `(x_d, y_d, z_0)` in metres; `z` points along gravity, measured
    /// from the lattice centre.
    pub center: [f64; 3],
    /// Edge lengths in metres.
    pub edges: [f64; 3],
    /// Detection efficiency, `1 - exp(-eps * tau)`.
    pub kappa: f64,
}

impl DetectorBox {
    pub fn new(center: [f64; 3], edges: [f64; 3], kappa: f64) -> Result<Self> {
        let det = Self { center, edges, kappa };
        det.validate()?;
        Ok(det)
    }

    /// Detector directly below the lattice at fall distance `z0`.
    pub fn below(z0: f64, edges: [f64; 3], kappa: f64) -> Result<Self> {
        Self::new([0.0, 0.0, z0], edges, kappa)
    }

    pub fn validate(&self) -> Result<()> {
        if self.center.iter().any(|c| !c.is_finite()) {
            return domain("detector centre must be finite");
        }
        if self.edges.iter().any(|&e| !(e.is_finite() && e > 0.0)) {
            return domain(format!("detector edges must be positive, got {:?}", self.edges));
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return domain(format!("kappa must lie in [0, 1], got {}", self.kappa));
        }
        Ok(())
    }

    pub fn z0(&self) -> f64 {
        self.center[2]
    }

    /// Lower and upper bound along `axis`.
    pub fn bounds(&self, axis: usize) -> (f64, f64) {
        let half = 0.5 * self.edges[axis];
        (self.center[axis] - half, self.center[axis] + half)
    }
}

/// Occupation patterns for insulating states with at most one atom per site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    /// Every site occupied.
    Unit,
    /// Sites with even `ix + iy + iz` occupied.
    Checkerboard,
    /// Every second line (even `iy`) occupied. In 1D this falls back to
    /// alternating pairs `1,1,0,0,...`.
    Striped,
    /// First half of the sites (row-major) occupied, second half empty.
    Block,
    /// Alternating runs of `width` occupied and `width` empty sites
    /// (row-major), starting occupied.
    Blocks { width: usize },
}

impl std::str::FromStr for PatternKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Self::Unit),
            "checkerboard" => Ok(Self::Checkerboard),
            "striped" => Ok(Self::Striped),
            "block" => Ok(Self::Block),
            other => match other.strip_prefix("blocks:").map(str::parse::<usize>) {
                Some(Ok(width)) if width > 0 => Ok(Self::Blocks { width }),
                _ => domain(format!("unknown pattern '{other}'")),
            },
        }
    }
}

/// Initial state of the atoms in the lattice.
#[derive(Debug, Clone, PartialEq)]
pub enum ManyBodyState {
    /// Product of on-site coherent states.
    CoherentProduct { amplitudes: Vec<Complex64> },
    /// Insulator with occupations in `{0, 1}`.
    FockPattern { occupations: Vec<u8> },
    /// Equal-weight superposition of every way to place `particles` atoms on
    /// `sites` sites with at most one atom per site.
    SymmetricSuperposition { particles: usize, sites: usize },
}

impl ManyBodyState {
    pub fn unit_filling(sites: usize) -> Self {
        Self::FockPattern { occupations: vec![1; sites] }
    }

    pub fn homogeneous(sites: usize, alpha: Complex64) -> Self {
        Self::CoherentProduct { amplitudes: vec![alpha; sites] }
    }

    pub fn site_count(&self) -> usize {
        match self {
            Self::CoherentProduct { amplitudes } => amplitudes.len(),
            Self::FockPattern { occupations } => occupations.len(),
            Self::SymmetricSuperposition { sites, .. } => *sites,
        }
    }

    /// Particle number for number states, `None` for coherent products.
    pub fn particle_number(&self) -> Option<usize> {
        match self {
            Self::CoherentProduct { .. } => None,
            Self::FockPattern { occupations } => Some(occupations.iter().map(|&n| n as usize).sum()),
            Self::SymmetricSuperposition { particles, .. } => Some(*particles),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::CoherentProduct { amplitudes } => {
                if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
                    return domain("coherent amplitudes must be finite");
                }
            }
            Self::FockPattern { occupations } => {
                if occupations.iter().any(|&n| n > 1) {
                    return domain("Fock patterns allow at most one atom per site");
                }
            }
            Self::SymmetricSuperposition { particles, sites } => {
                if *particles == 0 || particles > sites {
                    return domain(format!(
                        "superposition needs 0 < particles <= sites, got {particles} on {sites}"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn validate_for(&self, geometry: &LatticeGeometry) -> Result<()> {
        self.validate()?;
        if self.site_count() != geometry.site_count() {
            return domain(format!(
                "state defined on {} sites but lattice has {}",
                self.site_count(),
                geometry.site_count()
            ));
        }
        Ok(())
    }
}

pub fn make_pattern(kind: PatternKind, geometry: &LatticeGeometry) -> Result<ManyBodyState> {
    let n = geometry.site_count();
    let occupations: Vec<u8> = match kind {
        PatternKind::Unit => vec![1; n],
        PatternKind::Checkerboard => (0..n)
            .map(|s| {
                let [ix, iy, iz] = geometry.grid_index(s);
                u8::from((ix + iy + iz) % 2 == 0)
            })
            .collect(),
        PatternKind::Striped => {
            if geometry.dimensionality() <= 1 {
                (0..n).map(|s| u8::from((s / 2) % 2 == 0)).collect()
            } else {
                let line_axis = if geometry.dims[1] > 1 { 1 } else { 2 };
                (0..n)
                    .map(|s| u8::from(geometry.grid_index(s)[line_axis] % 2 == 0))
                    .collect()
            }
        }
        PatternKind::Block => {
            if n % 2 != 0 {
                return domain(format!("block pattern needs an even number of sites, got {n}"));
            }
            (0..n).map(|s| u8::from(s < n / 2)).collect()
        }
        PatternKind::Blocks { width } => (0..n).map(|s| u8::from((s / width) % 2 == 0)).collect(),
    };
    Ok(ManyBodyState::FockPattern { occupations })
}

/// Coherent product with amplitude `gamma` on odd sites and `beta` on even
/// sites, counting sites from one (so site index 0 carries `gamma`). In more
/// than one dimension the parity of `ix + iy + iz` is used instead.
pub fn make_supersolid(geometry: &LatticeGeometry, beta: Complex64, gamma: Complex64) -> ManyBodyState {
    let amplitudes = (0..geometry.site_count())
        .map(|s| {
            let [ix, iy, iz] = geometry.grid_index(s);
            if (ix + iy + iz) % 2 == 0 {
                gamma
            } else {
                beta
            }
        })
        .collect();
    ManyBodyState::CoherentProduct { amplitudes }
}
