//! Scalar fields on the reduced (s, r) half-plane.
//!
//! A [`CylField`] samples a cylindrically symmetric 3D function at cell
//! centers of a tensor grid. The r-axis always starts at the axis r = 0 and
//! samples at cell midpoints, so no sample ever sits on the axis; each cell
//! carries the 3D ring volume `2π r Δs Δr`.
//!
//! Axes are block-uniform: every face lies on a lattice of step `base`, so
//! s-separations between any two cell centers are exact integer multiples of
//! `base / 2`. The Poisson summation exploits this to reuse kernel values.

use crate::error::{CoreError, Result};
use std::io::{BufRead, Write};
use std::path::Path;

/// One coordinate axis of a tensor grid: cell faces, centers and widths.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    faces: Vec<f64>,
    centers: Vec<f64>,
    widths: Vec<f64>,
    /// Lattice step: every face is `faces[0] + k * base` for integer k.
    base: f64,
    /// Center positions in exact units of `base / 2` relative to `faces[0]`.
    icoords: Vec<i64>,
}

impl Axis {
    /// Uniform axis with `n` cells of width `step`, first face at `start`.
    pub fn uniform(start: f64, step: f64, n: usize) -> Result<Axis> {
        Axis::blocks(start, step, &[(1, n)])
    }

    /// Block-uniform axis: each `(q, count)` entry adds `count` cells of
    /// width `q * base`. Face positions are exact multiples of `base`.
    pub fn blocks(start: f64, base: f64, blocks: &[(usize, usize)]) -> Result<Axis> {
        if !(base > 0.0) || !base.is_finite() {
            return Err(CoreError::Grid(format!("axis base step {base} invalid")));
        }
        let n: usize = blocks.iter().map(|&(_, c)| c).sum();
        if n == 0 {
            return Err(CoreError::Grid("axis with zero cells".into()));
        }
        let mut faces = Vec::with_capacity(n + 1);
        let mut centers = Vec::with_capacity(n);
        let mut widths = Vec::with_capacity(n);
        let mut icoords = Vec::with_capacity(n);
        let mut pos: i64 = 0; // face position in base units
        faces.push(start);
        for &(q, count) in blocks {
            if q == 0 {
                return Err(CoreError::Grid("zero width multiplier".into()));
            }
            let q = q as i64;
            for _ in 0..count {
                let ic = 2 * pos + q; // center in base/2 units
                icoords.push(ic);
                pos += q;
                faces.push(start + pos as f64 * base);
                widths.push(q as f64 * base);
                centers.push(start + ic as f64 * base * 0.5);
            }
        }
        Ok(Axis {
            faces,
            centers,
            widths,
            base,
            icoords,
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn icoords(&self) -> &[i64] {
        &self.icoords
    }

    pub fn start(&self) -> f64 {
        self.faces[0]
    }

    pub fn end(&self) -> f64 {
        *self.faces.last().unwrap()
    }

    /// True when all cells share one width.
    pub fn is_uniform(&self) -> bool {
        let w0 = self.widths[0];
        self.widths.iter().all(|&w| (w - w0).abs() < 1e-14 * w0)
    }

    /// Index of the cell whose center is nearest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        match self
            .centers
            .binary_search_by(|c| c.partial_cmp(&x).unwrap())
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.len() => self.len() - 1,
            Err(i) => {
                if (x - self.centers[i - 1]).abs() <= (self.centers[i] - x).abs() {
                    i - 1
                } else {
                    i
                }
            }
        }
    }
}

/// Scalar field on a cylindrical (s, r) tensor grid, values at cell centers,
/// stored r-row major (`index = j * ns + i`).
#[derive(Debug, Clone, PartialEq)]
pub struct CylField {
    s: Axis,
    r: Axis,
    values: Vec<f64>,
}

impl CylField {
    /// Zero field on the given axes. The r-axis must start at the axis r = 0.
    pub fn zeros(s: Axis, r: Axis) -> Result<CylField> {
        if r.start().abs() > 1e-14 * r.base() {
            return Err(CoreError::Grid(format!(
                "r axis must start at 0, got {}",
                r.start()
            )));
        }
        let n = s.len() * r.len();
        Ok(CylField {
            s,
            r,
            values: vec![0.0; n],
        })
    }

    /// Uniform grid: `ns` cells of width `hs` starting at `s_min`, `nr` cells
    /// of width `hr` starting at the axis (r samples at `(j + 1/2) hr`).
    pub fn uniform(s_min: f64, hs: f64, ns: usize, hr: f64, nr: usize) -> Result<CylField> {
        CylField::zeros(Axis::uniform(s_min, hs, ns)?, Axis::uniform(0.0, hr, nr)?)
    }

    /// Build from a function of the cell center.
    pub fn from_fn(s: Axis, r: Axis, mut f: impl FnMut(f64, f64) -> f64) -> Result<CylField> {
        let mut fld = CylField::zeros(s, r)?;
        let ns = fld.s.len();
        for j in 0..fld.r.len() {
            let rj = fld.r.centers[j];
            for i in 0..ns {
                fld.values[j * ns + i] = f(fld.s.centers[i], rj);
            }
        }
        Ok(fld)
    }

    pub fn ns(&self) -> usize {
        self.s.len()
    }

    pub fn nr(&self) -> usize {
        self.r.len()
    }

    pub fn s_axis(&self) -> &Axis {
        &self.s
    }

    pub fn r_axis(&self) -> &Axis {
        &self.r
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.s.len() + i
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.s.len() + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.values[k] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// 3D volume of cell (i, j): `2π r_j Δs_i Δr_j`.
    #[inline]
    pub fn volume(&self, i: usize, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.r.centers[j] * self.s.widths[i] * self.r.widths[j]
    }

    pub fn same_grid(&self, other: &CylField) -> bool {
        self.s == other.s && self.r == other.r
    }

    /// Volume-weighted integral `∫ f dV` over the grid.
    pub fn integral(&self) -> f64 {
        let ns = self.s.len();
        let mut acc = Vec::with_capacity(self.r.len());
        for j in 0..self.r.len() {
            let w = 2.0 * std::f64::consts::PI * self.r.centers[j] * self.r.widths[j];
            let mut row = 0.0;
            for i in 0..ns {
                row += self.values[j * ns + i] * self.s.widths[i];
            }
            acc.push(row * w);
        }
        acc.iter().sum()
    }

    /// Volume-weighted L2 norm.
    pub fn norm_l2(&self) -> f64 {
        let ns = self.s.len();
        let mut acc = 0.0;
        for j in 0..self.r.len() {
            let w = 2.0 * std::f64::consts::PI * self.r.centers[j] * self.r.widths[j];
            for i in 0..ns {
                let v = self.values[j * ns + i];
                acc += v * v * self.s.widths[i] * w;
            }
        }
        acc.sqrt()
    }

    /// Index and value of the cell with the largest value.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        let ns = self.s.len();
        for j in 0..self.r.len() {
            for i in 0..ns {
                let v = self.values[j * ns + i];
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        best
    }

    /// Bilinear interpolation at (s, r); coordinates are clamped to the
    /// center range (flat extension past the first/last cell centers).
    pub fn value_at(&self, s: f64, r: f64) -> f64 {
        let interp = |axis: &Axis, x: f64| -> (usize, usize, f64) {
            let c = axis.centers();
            let n = c.len();
            if x <= c[0] {
                return (0, 0, 0.0);
            }
            if x >= c[n - 1] {
                return (n - 1, n - 1, 0.0);
            }
            let hi = c.partition_point(|&v| v < x).min(n - 1);
            let lo = hi - 1;
            let t = (x - c[lo]) / (c[hi] - c[lo]);
            (lo, hi, t)
        };
        let (i0, i1, ts) = interp(&self.s, s);
        let (j0, j1, tr) = interp(&self.r, r);
        let v00 = self.get(i0, j0);
        let v10 = self.get(i1, j0);
        let v01 = self.get(i0, j1);
        let v11 = self.get(i1, j1);
        (1.0 - tr) * ((1.0 - ts) * v00 + ts * v10) + tr * ((1.0 - ts) * v01 + ts * v11)
    }

    /// Dirichlet form `∫ |∇u|^2 dV` of the finite-volume discretization:
    /// zero extension past the outer boundaries, natural (zero-area) face at
    /// the axis. Exactly dual to [`CylField::laplacian`].
    pub fn dirichlet_form(&self) -> f64 {
        use std::f64::consts::PI;
        let ns = self.s.len();
        let nr = self.r.len();
        let (sw, rw) = (self.s.widths(), self.r.widths());
        let rc = self.r.centers();
        let rf = self.r.faces();
        let mut total = 0.0;
        // s-directed faces, including the two boundary faces per row
        for j in 0..nr {
            let coef = 2.0 * PI * rc[j] * rw[j];
            let row = &self.values[j * ns..(j + 1) * ns];
            let mut acc = 0.0;
            // left boundary face (ghost 0 at distance sw[0])
            acc += row[0] * row[0] / sw[0];
            for i in 0..ns - 1 {
                let d = 0.5 * (sw[i] + sw[i + 1]);
                let du = row[i + 1] - row[i];
                acc += du * du / d;
            }
            acc += row[ns - 1] * row[ns - 1] / sw[ns - 1];
            total += coef * acc;
        }
        // r-directed faces; face at r = 0 has zero area and is skipped
        for j in 0..nr - 1 {
            let area = 2.0 * PI * rf[j + 1];
            let d = 0.5 * (rw[j] + rw[j + 1]);
            let row0 = &self.values[j * ns..(j + 1) * ns];
            let row1 = &self.values[(j + 1) * ns..(j + 2) * ns];
            let mut acc = 0.0;
            for i in 0..ns {
                let du = row1[i] - row0[i];
                acc += du * du * self.s.widths[i];
            }
            total += area / d * acc;
        }
        // outer boundary face at r = r_max (ghost 0)
        let j = nr - 1;
        let area = 2.0 * PI * rf[nr];
        let row = &self.values[j * ns..(j + 1) * ns];
        let mut acc = 0.0;
        for i in 0..ns {
            acc += row[i] * row[i] * self.s.widths[i];
        }
        total += area / rw[j] * acc;
        total
    }

    /// Finite-volume cylindrical Laplacian `Δ_cyl u = u_ss + u_rr + u_r / r`
    /// with the same boundary treatment as [`CylField::dirichlet_form`], so
    /// that `⟨-Δu, u⟩ = ∫ |∇u|^2 dV` holds exactly on the grid.
    pub fn laplacian(&self) -> CylField {
        let mut out = CylField::zeros(self.s.clone(), self.r.clone()).unwrap();
        self.laplacian_into(&mut out);
        out
    }

    /// In-place variant of [`CylField::laplacian`] for iterative solvers.
    pub fn laplacian_into(&self, out: &mut CylField) {
        use std::f64::consts::PI;
        let ns = self.s.len();
        let nr = self.r.len();
        let (sw, rw) = (self.s.widths(), self.r.widths());
        let rc = self.r.centers();
        let rf = self.r.faces();
        debug_assert!(out.same_grid(self));
        for j in 0..nr {
            let vol_r = 2.0 * PI * rc[j] * rw[j];
            for i in 0..ns {
                let u = self.get(i, j);
                let vol = vol_r * sw[i];
                let mut flux = 0.0;
                // s faces
                let a_s = vol_r; // 2π r_j Δr_j
                let ul = if i > 0 { self.get(i - 1, j) } else { 0.0 };
                let dl = if i > 0 {
                    0.5 * (sw[i - 1] + sw[i])
                } else {
                    sw[0]
                };
                flux += a_s * (ul - u) / dl;
                let ur = if i + 1 < ns { self.get(i + 1, j) } else { 0.0 };
                let dr_ = if i + 1 < ns {
                    0.5 * (sw[i] + sw[i + 1])
                } else {
                    sw[ns - 1]
                };
                flux += a_s * (ur - u) / dr_;
                // r faces: inner face area 2π r_{j-1/2} Δs, zero at the axis
                if j > 0 {
                    let a = 2.0 * PI * rf[j] * sw[i];
                    let d = 0.5 * (rw[j - 1] + rw[j]);
                    flux += a * (self.get(i, j - 1) - u) / d;
                }
                let a_top = 2.0 * PI * rf[j + 1] * sw[i];
                if j + 1 < nr {
                    let d = 0.5 * (rw[j] + rw[j + 1]);
                    flux += a_top * (self.get(i, j + 1) - u) / d;
                } else {
                    flux += a_top * (0.0 - u) / rw[j];
                }
                out.set(i, j, flux / vol);
            }
        }
    }

    /// Write as a plain-text grid file: header, face coordinates, then one
    /// line of `ns` values per r-row.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "# cylfield v1")?;
        writeln!(f, "ns {} nr {}", self.ns(), self.nr())?;
        writeln!(f, "s_base {:.17e}", self.s.base())?;
        writeln!(f, "r_base {:.17e}", self.r.base())?;
        if self.s.is_uniform() && self.r.is_uniform() {
            writeln!(f, "hs {:.17e} hr {:.17e}", self.s.widths[0], self.r.widths[0])?;
        }
        write!(f, "s_faces")?;
        for v in self.s.faces() {
            write!(f, " {v:.17e}")?;
        }
        writeln!(f)?;
        write!(f, "r_faces")?;
        for v in self.r.faces() {
            write!(f, " {v:.17e}")?;
        }
        writeln!(f)?;
        for j in 0..self.nr() {
            let row = &self.values[j * self.ns()..(j + 1) * self.ns()];
            let mut line = String::with_capacity(row.len() * 25);
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    line.push(' ');
                }
                line.push_str(&format!("{v:.17e}"));
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }

    /// Read a field written by [`CylField::write_text`].
    pub fn read_text(path: &Path) -> Result<CylField> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut lines = f.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| CoreError::Grid("truncated field file".into()))?
                .map_err(CoreError::Io)
        };
        let header = next()?;
        if !header.starts_with("# cylfield v1") {
            return Err(CoreError::Grid("not a cylfield file".into()));
        }
        let dims = next()?;
        let tok: Vec<&str> = dims.split_whitespace().collect();
        let parse_usize = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| CoreError::Grid(format!("bad integer {s}")))
        };
        if tok.len() != 4 || tok[0] != "ns" || tok[2] != "nr" {
            return Err(CoreError::Grid("bad dims line".into()));
        }
        let (ns, nr) = (parse_usize(tok[1])?, parse_usize(tok[3])?);
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| CoreError::Grid(format!("bad float {s}")))
        };
        let s_base = parse_f64(next()?.split_whitespace().nth(1).unwrap_or(""))?;
        let r_base = parse_f64(next()?.split_whitespace().nth(1).unwrap_or(""))?;
        let mut line = next()?;
        if line.starts_with("hs") {
            line = next()?; // optional uniform-step hint, not needed to rebuild
        }
        let parse_faces = |line: &str, tag: &str, n: usize| -> Result<Vec<f64>> {
            let mut it = line.split_whitespace();
            if it.next() != Some(tag) {
                return Err(CoreError::Grid(format!("expected {tag} line")));
            }
            let faces: Vec<f64> = it.map(|t| t.parse().unwrap_or(f64::NAN)).collect();
            if faces.len() != n + 1 || faces.iter().any(|v| !v.is_finite()) {
                return Err(CoreError::Grid(format!("bad {tag} line")));
            }
            Ok(faces)
        };
        let s_faces = parse_faces(&line, "s_faces", ns)?;
        let r_faces = parse_faces(&next()?, "r_faces", nr)?;
        let axis_from_faces = |faces: Vec<f64>, base: f64| -> Result<Axis> {
            let mut blocks: Vec<(usize, usize)> = Vec::new();
            for w in faces.windows(2) {
                let q = ((w[1] - w[0]) / base).round() as usize;
                if q == 0 {
                    return Err(CoreError::Grid("face spacing below base".into()));
                }
                match blocks.last_mut() {
                    Some((q0, c)) if *q0 == q => *c += 1,
                    _ => blocks.push((q, 1)),
                }
            }
            Axis::blocks(faces[0], base, &blocks)
        };
        let s = axis_from_faces(s_faces, s_base)?;
        let r = axis_from_faces(r_faces, r_base)?;
        let mut fld = CylField::zeros(s, r)?;
        for j in 0..nr {
            let row = next()?;
            let vals: Vec<f64> = row
                .split_whitespace()
                .map(|t| t.parse().unwrap_or(f64::NAN))
                .collect();
            if vals.len() != ns || vals.iter().any(|v| !v.is_finite()) {
                return Err(CoreError::Grid(format!("bad value row {j}")));
            }
            fld.values[j * ns..(j + 1) * ns].copy_from_slice(&vals);
        }
        Ok(fld)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_blocks_tile_exactly() {
        let a = Axis::blocks(-1.0, 0.25, &[(2, 2), (1, 4), (2, 2)]).unwrap();
        assert_eq!(a.len(), 8);
        assert!((a.end() - 1.0).abs() < 1e-15);
        // centers sit on the base/2 lattice
        for (c, ic) in a.centers().iter().zip(a.icoords()) {
            assert!((c - (-1.0 + *ic as f64 * 0.125)).abs() < 1e-15);
        }
    }

    #[test]
    fn r_axis_never_touches_axis() {
        let f = CylField::uniform(-1.0, 0.1, 20, 0.1, 10).unwrap();
        assert!(f.r_axis().centers()[0] > 0.0);
        assert!((f.r_axis().centers()[0] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn laplacian_is_dual_to_dirichlet_form() {
        let s = Axis::blocks(-0.8, 0.1, &[(2, 3), (1, 6), (2, 3)]).unwrap();
        let r = Axis::blocks(0.0, 0.1, &[(1, 8), (2, 4)]).unwrap();
        let u = CylField::from_fn(s, r, |s, r| (1.3 * s).sin() * (-r).exp() + 0.1 * s * r).unwrap();
        let lap = u.laplacian();
        let mut inner = 0.0;
        for j in 0..u.nr() {
            for i in 0..u.ns() {
                inner += -lap.get(i, j) * u.get(i, j) * u.volume(i, j);
            }
        }
        let form = u.dirichlet_form();
        assert!(
            (inner - form).abs() <= 1e-12 * form.abs().max(1.0),
            "duality violated: {inner} vs {form}"
        );
    }

    #[test]
    fn interpolation_reproduces_bilinear_data() {
        let f = CylField::from_fn(
            Axis::uniform(-1.0, 0.125, 16).unwrap(),
            Axis::uniform(0.0, 0.125, 16).unwrap(),
            |s, r| 2.0 * s + 3.0 * r - 0.5,
        )
        .unwrap();
        assert!((f.value_at(0.3, 0.7) - (2.0 * 0.3 + 3.0 * 0.7 - 0.5)).abs() < 1e-13);
    }

    #[test]
    fn text_roundtrip() {
        let f = CylField::from_fn(
            Axis::blocks(-0.5, 0.05, &[(1, 10), (4, 3)]).unwrap(),
            Axis::uniform(0.0, 0.1, 7).unwrap(),
            |s, r| s * r + 1.0,
        )
        .unwrap();
        let dir = std::env::temp_dir().join("ringwave_field_roundtrip.txt");
        f.write_text(&dir).unwrap();
        let g = CylField::read_text(&dir).unwrap();
        assert!(f.same_grid(&g));
        assert_eq!(f.values(), g.values());
    }
}
