//! Box energies of the variational conductivity formula.
//!
//! The box `[0, L]^d`, `L = n / k_scale`, carries a grid of `M = n s` cells
//! per side. For a direction `η` we minimize
//!
//! ```text
//! e(η) = M^{-d} Σ_{kept cells} |cell|⁻¹ ∫_cell |η - ∇v|²
//! ```
//!
//! over continuous piecewise multilinear `v` vanishing on the box boundary.
//! Cell integrals use the tensor 2-point Gauss rule, which is exact here. The
//! normalization makes `e(η) = |η|²` when no cell is excluded.
//!
//! Which cells are kept is decided by a [`DomainRule`], or for the filled
//! model by [`CellMask::filled_center`].

use alloc::vec::Vec;

use crate::geometry::raster::{fill_on_grid, fill_padding, RasterGrid};
use crate::geometry::{BooleanModel, CellState, GeometryParams};
use crate::linalg::{cg, symmetric_eigenvalues, CgConfig, CgStats, LinearOperator};
use crate::percolation::{build_field, count_channels, LatticeField, LatticeParams};
use crate::point::{Point, PointCloud, Window};
use crate::union_find::DisjointSet;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DomainRule {
    /// Cells inside open lattice cubes.
    Strict,
    /// Cells whose center is not in the Boolean model.
    #[default]
    Center,
    /// Cells not certainly inside the Boolean model: excluded only when the
    /// nearest center is within `r` minus half the cell diagonal.
    Cover,
}

impl DomainRule {
    pub fn name(self) -> &'static str {
        match self {
            DomainRule::Strict => "STRICT",
            DomainRule::Center => "CENTER",
            DomainRule::Cover => "COVER",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalProblem {
    pub dim: usize,
    pub k_scale: usize,
    /// Lattice side in vertices.
    pub n: usize,
    /// Grid cells per lattice cube and axis.
    pub s: usize,
    pub rule: DomainRule,
    pub cg: CgConfig,
}

impl VariationalProblem {
    pub fn new(dim: usize, k_scale: usize, n: usize, s: usize, rule: DomainRule) -> Result<Self> {
        crate::point::check_dim(dim)?;
        if k_scale == 0 || n == 0 {
            return Err(Error::param("n", "lattice side and k_scale must be positive"));
        }
        if s == 0 {
            return Err(Error::param("s", "grid refinement must be at least 1"));
        }
        Ok(VariationalProblem {
            dim,
            k_scale,
            n,
            s,
            rule,
            cg: CgConfig::default(),
        })
    }

    pub fn with_rule(&self, rule: DomainRule) -> Self {
        VariationalProblem { rule, ..*self }
    }

    pub fn lattice(&self) -> LatticeParams {
        LatticeParams {
            k_scale: self.k_scale,
            n: self.n,
        }
    }

    /// Box side `L`.
    pub fn side(&self) -> f64 {
        self.n as f64 / self.k_scale as f64
    }

    /// Cells per side `M`.
    pub fn cells_per_side(&self) -> usize {
        self.n * self.s
    }

    pub fn cell_size(&self) -> f64 {
        1.0 / (self.k_scale * self.s) as f64
    }

    fn cell_count(&self) -> usize {
        self.cells_per_side().pow(self.dim as u32)
    }

    fn cell_coords(&self, c: usize) -> [usize; 3] {
        let m = self.cells_per_side();
        [c % m, (c / m) % m, c / (m * m)]
    }

    fn cell_center(&self, c: usize) -> Point {
        let z = self.cell_coords(c);
        let h = self.cell_size();
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = (z[a] as f64 + 0.5) * h;
        }
        p
    }

    fn box_window(&self) -> Window {
        let side = self.side();
        if self.dim == 3 {
            Window::cube(0.0, side)
        } else {
            Window::square(0.0, side)
        }
    }
}

/// Kept/excluded flag per grid cell, indexed `c1 + M c2 + M² c3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMask {
    pub dim: usize,
    pub m: usize,
    pub kept: Vec<bool>,
}

impl CellMask {
    pub fn all(problem: &VariationalProblem) -> Self {
        CellMask {
            dim: problem.dim,
            m: problem.cells_per_side(),
            kept: alloc::vec![true; problem.cell_count()],
        }
    }

    pub fn from_fn(problem: &VariationalProblem, mut keep: impl FnMut([usize; 3]) -> bool) -> Self {
        let mut mask = Self::all(problem);
        for c in 0..mask.kept.len() {
            mask.kept[c] = keep(problem.cell_coords(c));
        }
        mask
    }

    /// Cells inside open lattice cubes of `field`.
    pub fn strict(problem: &VariationalProblem, field: &LatticeField) -> Result<Self> {
        if field.n() != problem.n || field.dim() != problem.dim {
            return Err(Error::param("field", "lattice does not match the variational problem"));
        }
        let s = problem.s;
        Ok(Self::from_fn(problem, |z| field.is_open(field.index([z[0] / s, z[1] / s, z[2] / s]))))
    }

    /// Mask of `problem.rule` for the Boolean model of `cloud` (box frame).
    pub fn for_rule(problem: &VariationalProblem, cloud: &PointCloud, geometry: &GeometryParams) -> Result<Self> {
        check_cloud(problem, cloud)?;
        match problem.rule {
            DomainRule::Strict => {
                let field = build_field(cloud, geometry, &problem.lattice())?;
                Self::strict(problem, &field)
            }
            DomainRule::Center => {
                let model = BooleanModel::new(cloud, geometry);
                Ok(Self::from_cells(problem, |c| !model.covered(&problem.cell_center(c))))
            }
            DomainRule::Cover => {
                let half_diag = 0.5 * problem.cell_size() * libm::sqrt(problem.dim as f64);
                let reach = geometry.r - half_diag;
                if reach < 0.0 {
                    return Ok(Self::all(problem));
                }
                let model = BooleanModel::new(cloud, geometry);
                Ok(Self::from_cells(problem, |c| match model.nearest_center(&problem.cell_center(c)) {
                    Some(d) => d > reach,
                    None => true,
                }))
            }
        }
    }

    /// CENTER rule for the filled model: additionally excludes cells whose
    /// center lies in an island. The result is a subset of the CENTER mask.
    pub fn filled_center(problem: &VariationalProblem, cloud: &PointCloud, geometry: &GeometryParams) -> Result<Self> {
        let base = Self::for_rule(&problem.with_rule(DomainRule::Center), cloud, geometry)?;
        let h = problem.cell_size();
        let pad_cells = libm::ceil(fill_padding(cloud, geometry, h) / h) as usize;
        let pad = pad_cells as f64 * h;
        let grid = RasterGrid::covering(&problem.box_window(), pad, h);
        let raster = fill_on_grid(grid, cloud.points(), geometry.r);
        let mut mask = base;
        for c in 0..mask.kept.len() {
            if !mask.kept[c] {
                continue;
            }
            let z = problem.cell_coords(c);
            let k = if problem.dim == 3 { z[2] + pad_cells } else { 0 };
            let idx = grid.index(z[0] + pad_cells, z[1] + pad_cells, k);
            if raster.state(idx) == CellState::VacantIsland {
                mask.kept[c] = false;
            }
        }
        Ok(mask)
    }

    fn from_cells(problem: &VariationalProblem, mut keep: impl FnMut(usize) -> bool) -> Self {
        let mut mask = Self::all(problem);
        for c in 0..mask.kept.len() {
            mask.kept[c] = keep(c);
        }
        mask
    }

    pub fn kept_count(&self) -> usize {
        self.kept.iter().filter(|&&k| k).count()
    }

    pub fn is_subset_of(&self, other: &CellMask) -> bool {
        self.kept.len() == other.kept.len() && self.kept.iter().zip(&other.kept).all(|(&a, &b)| !a || b)
    }
}

fn check_cloud(problem: &VariationalProblem, cloud: &PointCloud) -> Result<()> {
    if cloud.dim() != problem.dim {
        return Err(Error::param("cloud", "dimension differs from the variational problem"));
    }
    Ok(())
}

/// Reference Q1 element on the unit cell: basis gradients at the Gauss points.
struct Element {
    nodes: usize,
    /// `grad[g][i][a]`
    grad: Vec<Vec<[f64; 3]>>,
    weight: f64,
    /// `Σ_g w ∇φ_i · ∇φ_j`
    stiffness: Vec<f64>,
}

impl Element {
    fn new(dim: usize) -> Self {
        let nodes = 1 << dim;
        let q = 0.5 / libm::sqrt(3.0);
        let gauss = [0.5 - q, 0.5 + q];
        let mut grad = Vec::with_capacity(nodes);
        for g in 0..nodes {
            let x: [f64; 3] = core::array::from_fn(|a| if a < dim { gauss[(g >> a) & 1] } else { 0.0 });
            let mut gi = Vec::with_capacity(nodes);
            for i in 0..nodes {
                let mut d = [0.0; 3];
                for a in 0..dim {
                    let mut v = if (i >> a) & 1 == 1 { 1.0 } else { -1.0 };
                    for b in 0..dim {
                        if b != a {
                            v *= if (i >> b) & 1 == 1 { x[b] } else { 1.0 - x[b] };
                        }
                    }
                    d[a] = v;
                }
                gi.push(d);
            }
            grad.push(gi);
        }
        let weight = 1.0 / nodes as f64;
        let mut stiffness = alloc::vec![0.0; nodes * nodes];
        for gg in &grad {
            for i in 0..nodes {
                for j in 0..nodes {
                    let dotp: f64 = (0..dim).map(|a| gg[i][a] * gg[j][a]).sum();
                    stiffness[i * nodes + j] += weight * dotp;
                }
            }
        }
        Element {
            nodes,
            grad,
            weight,
            stiffness,
        }
    }
}

/// Grid topology shared by the operator and the energy evaluation.
struct Mesh {
    dim: usize,
    m: usize,
    h: f64,
    kept_cells: Vec<usize>,
    el: Element,
}

impl Mesh {
    fn new(problem: &VariationalProblem, mask: &CellMask) -> Self {
        let kept_cells = (0..mask.kept.len()).filter(|&c| mask.kept[c]).collect();
        Mesh {
            dim: problem.dim,
            m: problem.cells_per_side(),
            h: problem.cell_size(),
            kept_cells,
            el: Element::new(problem.dim),
        }
    }

    fn vertices_per_side(&self) -> usize {
        self.m + 1
    }

    fn vertex_count(&self) -> usize {
        self.vertices_per_side().pow(self.dim as u32)
    }

    #[inline]
    fn cell_vertices(&self, c: usize, out: &mut [usize; 8]) {
        let m = self.m;
        let v = m + 1;
        let z = [c % m, (c / m) % m, c / (m * m)];
        for i in 0..self.el.nodes {
            let a = z[0] + (i & 1);
            let b = z[1] + ((i >> 1) & 1);
            let cz = z[2] + ((i >> 2) & 1);
            out[i] = a + v * (b + v * cz);
        }
    }

    fn on_boundary(&self, vtx: usize) -> bool {
        let v = self.m + 1;
        let z = [vtx % v, (vtx / v) % v, vtx / (v * v)];
        (0..self.dim).any(|a| z[a] == 0 || z[a] == self.m)
    }

    /// Vertices whose value is fixed: boundary vertices, vertices touching no
    /// kept cell, and one vertex per kept component that misses the boundary.
    fn fixed_vertices(&self) -> Vec<bool> {
        let nv = self.vertex_count();
        let mut touched = alloc::vec![false; nv];
        let mut dsu = DisjointSet::new(nv);
        let mut verts = [0usize; 8];
        for &c in &self.kept_cells {
            self.cell_vertices(c, &mut verts);
            for i in 0..self.el.nodes {
                touched[verts[i]] = true;
                dsu.union(verts[0], verts[i]);
            }
        }
        let mut fixed: Vec<bool> = (0..nv).map(|v| !touched[v] || self.on_boundary(v)).collect();
        let mut anchored = alloc::vec![false; nv];
        for v in 0..nv {
            if touched[v] && self.on_boundary(v) {
                let root = dsu.find(v);
                anchored[root] = true;
            }
        }
        for v in 0..nv {
            if touched[v] {
                let root = dsu.find(v);
                if !anchored[root] {
                    anchored[root] = true;
                    fixed[v] = true;
                }
            }
        }
        fixed
    }

    /// Normalized energy of `v` for direction `eta`.
    fn energy(&self, v: &[f64], eta: &[f64; 3]) -> f64 {
        let mut verts = [0usize; 8];
        let mut total = 0.0;
        let inv_h = 1.0 / self.h;
        for &c in &self.kept_cells {
            self.cell_vertices(c, &mut verts);
            let mut cell = 0.0;
            for gg in &self.el.grad {
                let mut s = 0.0;
                for a in 0..self.dim {
                    let mut g = 0.0;
                    for i in 0..self.el.nodes {
                        g += v[verts[i]] * gg[i][a];
                    }
                    let d = eta[a] - g * inv_h;
                    s += d * d;
                }
                cell += self.el.weight * s;
            }
            total += cell;
        }
        total / self.m.pow(self.dim as u32) as f64
    }

    /// Right-hand side `Σ_cells h Σ_g w η·∇φ_i`, in the scaling where the
    /// operator is the unscaled reference stiffness.
    fn load(&self, eta: &[f64; 3]) -> Vec<f64> {
        let mut b = alloc::vec![0.0; self.vertex_count()];
        let mut local = [0.0; 8];
        for i in 0..self.el.nodes {
            for gg in &self.el.grad {
                local[i] += self.el.weight * (0..self.dim).map(|a| eta[a] * gg[i][a]).sum::<f64>();
            }
        }
        let mut verts = [0usize; 8];
        for &c in &self.kept_cells {
            self.cell_vertices(c, &mut verts);
            for i in 0..self.el.nodes {
                b[verts[i]] += self.h * local[i];
            }
        }
        b
    }

    fn apply_full(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        let nodes = self.el.nodes;
        let k = &self.el.stiffness;
        let mut verts = [0usize; 8];
        for &c in &self.kept_cells {
            self.cell_vertices(c, &mut verts);
            for i in 0..nodes {
                let mut acc = 0.0;
                for j in 0..nodes {
                    acc += k[i * nodes + j] * x[verts[j]];
                }
                y[verts[i]] += acc;
            }
        }
    }
}

/// Reference stiffness restricted to free vertices.
struct FreeOperator<'m> {
    mesh: &'m Mesh,
    fixed: &'m [bool],
}

impl LinearOperator for FreeOperator<'_> {
    fn len(&self) -> usize {
        self.mesh.vertex_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let masked: Vec<f64> = x
            .iter()
            .zip(self.fixed)
            .map(|(&v, &f)| if f { 0.0 } else { v })
            .collect();
        self.mesh.apply_full(&masked, y);
        for (v, &f) in y.iter_mut().zip(self.fixed) {
            if f {
                *v = 0.0;
            }
        }
    }

    fn diagonal(&self) -> Option<Vec<f64>> {
        let nodes = self.mesh.el.nodes;
        let mut d = alloc::vec![0.0; self.len()];
        let mut verts = [0usize; 8];
        for &c in &self.mesh.kept_cells {
            self.mesh.cell_vertices(c, &mut verts);
            for i in 0..nodes {
                d[verts[i]] += self.mesh.el.stiffness[i * nodes + i];
            }
        }
        for (v, &f) in d.iter_mut().zip(self.fixed) {
            if f {
                *v = 1.0;
            }
        }
        Some(d)
    }
}

/// Minimizer on the grid, values at all vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectorField {
    pub v: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Minimal normalized energy for direction `eta` on the cells kept by `mask`.
pub fn energy(mask: &CellMask, problem: &VariationalProblem, eta: &[f64; 3]) -> Result<(f64, CorrectorField)> {
    energy_from(mask, problem, eta, &[])
}

/// As [`energy`], warm-started from the first of `starts` (boundary values
/// are reset to zero). The reported energy is the smallest over the final
/// iterate, the zero field and every start, so it never exceeds the energy
/// of any start.
pub fn energy_from(
    mask: &CellMask,
    problem: &VariationalProblem,
    eta: &[f64; 3],
    starts: &[&[f64]],
) -> Result<(f64, CorrectorField)> {
    if mask.dim != problem.dim || mask.m != problem.cells_per_side() {
        return Err(Error::param("mask", "cell mask does not match the variational problem"));
    }
    let mesh = Mesh::new(problem, mask);
    let nv = mesh.vertex_count();
    let fixed = mesh.fixed_vertices();
    let mut x0 = alloc::vec![0.0; nv];
    if let Some(s) = starts.first() {
        if s.len() != nv {
            return Err(Error::param("starts", "warm start has the wrong length"));
        }
        x0.copy_from_slice(s);
    }
    for v in 0..nv {
        if mesh.on_boundary(v) {
            x0[v] = 0.0;
        }
    }
    // Fixed values stay at x0; solve for the free correction.
    let b_full = mesh.load(eta);
    let mut ax0 = alloc::vec![0.0; nv];
    mesh.apply_full(&x0, &mut ax0);
    let rhs: Vec<f64> = (0..nv)
        .map(|i| if fixed[i] { 0.0 } else { b_full[i] - ax0[i] })
        .collect();
    let op = FreeOperator {
        mesh: &mesh,
        fixed: &fixed,
    };
    let mut dx = alloc::vec![0.0; nv];
    let stats: CgStats = cg(&op, &rhs, &mut dx, &problem.cg)?;
    let v: Vec<f64> = (0..nv).map(|i| x0[i] + if fixed[i] { 0.0 } else { dx[i] }).collect();

    let zero = alloc::vec![0.0; nv];
    let mut best = mesh.energy(&v, eta).min(mesh.energy(&zero, eta));
    let mut best_v = if mesh.energy(&v, eta) <= mesh.energy(&zero, eta) { v.clone() } else { zero };
    for s in starts {
        let e = mesh.energy(s, eta);
        if e < best {
            best = e;
            best_v = s.to_vec();
        }
    }
    Ok((
        best,
        CorrectorField {
            v: best_v,
            residual: stats.residual,
            iterations: stats.iterations,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConductivityReport {
    pub dim: usize,
    /// Symmetric estimate, upper-left `dim × dim` block used.
    pub a_hat: [[f64; 3]; 3],
    /// Probed directions with their normalized energies.
    pub energies: Vec<([f64; 3], f64)>,
    pub eigenvalues: [f64; 3],
    pub alpha: f64,
    pub rule: &'static str,
    pub n: usize,
    pub s: usize,
    pub k_scale: usize,
    pub kept_fraction: f64,
    pub max_residual: f64,
    pub max_iterations: usize,
}

fn unit(a: usize) -> [f64; 3] {
    let mut e = [0.0; 3];
    e[a] = 1.0;
    e
}

fn pair(a: usize, b: usize) -> [f64; 3] {
    let mut e = [0.0; 3];
    e[a] = 1.0;
    e[b] = 1.0;
    e
}

/// Directions probed by [`effective_matrix`]: `e_i`, then `e_i + e_j`.
pub fn probe_directions(dim: usize) -> Vec<[f64; 3]> {
    let mut d: Vec<[f64; 3]> = (0..dim).map(unit).collect();
    for a in 0..dim {
        for b in a + 1..dim {
            d.push(pair(a, b));
        }
    }
    d
}

/// Polarization of the energy form into a symmetric matrix.
pub fn effective_matrix(mask: &CellMask, problem: &VariationalProblem) -> Result<ConductivityReport> {
    effective_matrix_from(mask, problem, &[], "")
}

fn effective_matrix_from(
    mask: &CellMask,
    problem: &VariationalProblem,
    warm: &[CorrectorField],
    rule: &'static str,
) -> Result<ConductivityReport> {
    let dim = problem.dim;
    let dirs = probe_directions(dim);
    let mut energies = Vec::with_capacity(dirs.len());
    let mut max_residual: f64 = 0.0;
    let mut max_iterations = 0;
    for (i, eta) in dirs.iter().enumerate() {
        let starts: Vec<&[f64]> = warm.get(i).map(|w| w.v.as_slice()).into_iter().collect();
        let (e, field) = energy_from(mask, problem, eta, &starts)?;
        max_residual = max_residual.max(field.residual);
        max_iterations = max_iterations.max(field.iterations);
        energies.push((*eta, e));
    }
    Ok(assemble_report(problem, mask, energies, max_residual, max_iterations, rule))
}

fn assemble_report(
    problem: &VariationalProblem,
    mask: &CellMask,
    energies: Vec<([f64; 3], f64)>,
    max_residual: f64,
    max_iterations: usize,
    rule: &'static str,
) -> ConductivityReport {
    let dim = problem.dim;
    let mut a = [[0.0; 3]; 3];
    for i in 0..dim {
        a[i][i] = energies[i].1;
    }
    let mut k = dim;
    for i in 0..dim {
        for j in i + 1..dim {
            let off = 0.5 * (energies[k].1 - energies[i].1 - energies[j].1);
            a[i][j] = off;
            a[j][i] = off;
            k += 1;
        }
    }
    let eigenvalues = symmetric_eigenvalues(&a, dim);
    ConductivityReport {
        dim,
        a_hat: a,
        energies,
        eigenvalues,
        alpha: eigenvalues[0],
        rule: if rule.is_empty() { problem.rule.name() } else { rule },
        n: problem.n,
        s: problem.s,
        k_scale: problem.k_scale,
        kept_fraction: mask.kept_count() as f64 / mask.kept.len().max(1) as f64,
        max_residual,
        max_iterations,
    }
}

/// Reports on the same grid for the Boolean model and its filled version.
#[derive(Debug, Clone, PartialEq)]
pub struct FilledComparison {
    pub boolean: ConductivityReport,
    pub filled: ConductivityReport,
    /// `filled.a_hat - boolean.a_hat`.
    pub difference: [[f64; 3]; 3],
    pub identical_masks: bool,
}

/// Compares the CENTER-rule estimates with and without filling. The filled
/// solve starts from the unfilled minimizer, so `e_⊞(η) <= e_Ξ(η)` holds
/// exactly for every probed direction.
pub fn compare_filled(
    cloud: &PointCloud,
    geometry: &GeometryParams,
    problem: &VariationalProblem,
) -> Result<FilledComparison> {
    let center = problem.with_rule(DomainRule::Center);
    let xi_mask = CellMask::for_rule(&center, cloud, geometry)?;
    let filled_mask = CellMask::filled_center(&center, cloud, geometry)?;
    debug_assert!(filled_mask.is_subset_of(&xi_mask));

    let dirs = probe_directions(problem.dim);
    let mut xi_fields = Vec::with_capacity(dirs.len());
    let mut xi_energies = Vec::with_capacity(dirs.len());
    let mut res: f64 = 0.0;
    let mut its = 0;
    for eta in &dirs {
        let (e, f) = energy(&xi_mask, &center, eta)?;
        res = res.max(f.residual);
        its = its.max(f.iterations);
        xi_energies.push((*eta, e));
        xi_fields.push(f);
    }
    let boolean = assemble_report(&center, &xi_mask, xi_energies, res, its, "CENTER");
    let filled = if filled_mask == xi_mask {
        ConductivityReport {
            rule: "CENTER_FILLED",
            ..boolean.clone()
        }
    } else {
        effective_matrix_from(&filled_mask, &center, &xi_fields, "CENTER_FILLED")?
    };
    let mut difference = [[0.0; 3]; 3];
    for i in 0..problem.dim {
        for j in 0..problem.dim {
            difference[i][j] = filled.a_hat[i][j] - boolean.a_hat[i][j];
        }
    }
    Ok(FilledComparison {
        identical_masks: filled_mask == xi_mask,
        boolean,
        filled,
        difference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRecord {
    pub energy: f64,
    pub channels: usize,
    /// `(N / n^{d-1})²`.
    pub bound: f64,
    pub slack: f64,
}

pub const CHANNEL_BOUND_TOLERANCE: f64 = 1e-8;

/// Checks `e(e_1) >= (N / n^{d-1})²` for the COVER rule on the lattice
/// aligned grid. A violation beyond [`CHANNEL_BOUND_TOLERANCE`] is an error.
pub fn channel_bound_check(
    field: &LatticeField,
    cloud: &PointCloud,
    geometry: &GeometryParams,
    problem: &VariationalProblem,
) -> Result<BoundRecord> {
    if field.n() != problem.n || field.dim() != problem.dim {
        return Err(Error::param("field", "lattice does not match the variational problem"));
    }
    let cover = problem.with_rule(DomainRule::Cover);
    let mask = CellMask::for_rule(&cover, cloud, geometry)?;
    let (e, _) = energy(&mask, &cover, &unit(0))?;
    let channels = count_channels(field);
    let frac = channels as f64 / problem.n.pow(problem.dim as u32 - 1) as f64;
    let bound = frac * frac;
    let record = BoundRecord {
        energy: e,
        channels,
        bound,
        slack: e - bound,
    };
    if e < bound - CHANNEL_BOUND_TOLERANCE {
        return Err(Error::ChannelBoundViolated {
            energy: e,
            bound,
            channels,
        });
    }
    Ok(record)
}
