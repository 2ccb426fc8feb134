//! File formats: CSV at 17 significant digits (round-trip exact for f64),
//! P6 heatmaps with a fixed diverging colormap, the run manifest, kernel
//! cache files, and curve coefficient files.

use std::fs;
use std::io::Write;
use std::path::Path;

use eit_core::faddeev::FaddeevGreenTable;
use eit_core::mesh::{DiskGrid, LambdaGrid};
use eit_core::num::{c64, C64};
use eit_core::poly::BivarPoly;
use eit_core::scattering::ScatteringGrid;

pub fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)
}

/// Grid descriptor: one row per node, re(z), im(z), weight.
pub fn grid_csv(grid: &DiskGrid) -> String {
    let mut s = String::from("re_z,im_z,weight\n");
    for (z, w) in grid.nodes.iter().zip(&grid.weights) {
        s += &format!("{},{},{}\n", g17(z.re), g17(z.im), g17(*w));
    }
    s
}

/// Complex field on a grid: re(z), im(z), re(f), im(f).
pub fn field_csv(grid: &DiskGrid, f: &[C64]) -> String {
    let mut s = String::from("re_z,im_z,re_f,im_f\n");
    for (z, v) in grid.nodes.iter().zip(f) {
        s += &format!("{},{},{},{}\n", g17(z.re), g17(z.im), g17(v.re), g17(v.im));
    }
    s
}

pub fn real_field_csv(grid: &DiskGrid, f: &[f64]) -> String {
    let mut s = String::from("re_z,im_z,value\n");
    for (z, v) in grid.nodes.iter().zip(f) {
        s += &format!("{},{},{}\n", g17(z.re), g17(z.im), g17(*v));
    }
    s
}

/// DtN matrix, row-major "re,im" pairs.
pub fn dtn_csv(m: &eit_core::dtn::DtnOperator) -> String {
    let d = m.dim();
    let mut s = String::new();
    for i in 0..d {
        let mut row = Vec::with_capacity(d);
        for j in 0..d {
            let v = m.matrix.at(i, j);
            row.push(format!("{},{}", g17(v.re), g17(v.im)));
        }
        s += &row.join(",");
        s.push('\n');
    }
    s
}

/// Boundary trace keyed by lambda: theta, re(psi), im(psi).
pub fn trace_csv(lambda: C64, psi: &[C64]) -> String {
    let mut s = format!("# lambda = {},{}\ntheta,re_psi,im_psi\n", g17(lambda.re), g17(lambda.im));
    let n = psi.len();
    for (k, v) in psi.iter().enumerate() {
        let t = core::f64::consts::TAU * k as f64 / n as f64;
        s += &format!("{},{},{}\n", g17(t), g17(v.re), g17(v.im));
    }
    s
}

/// Scattering grid: re(lambda), im(lambda), re(b), im(b), mask.
pub fn scattering_csv(sg: &ScatteringGrid) -> String {
    let mut s = String::from("re_lambda,im_lambda,re_b,im_b,mask\n");
    for i in 0..sg.lgrid.len() {
        let l = sg.lgrid.nodes[i];
        let b = sg.b[i];
        s += &format!(
            "{},{},{},{},{}\n",
            g17(l.re),
            g17(l.im),
            g17(b.re),
            g17(b.im),
            u8::from(sg.exceptional_mask[i])
        );
    }
    s
}

pub fn parse_scattering_csv(text: &str, lgrid: &LambdaGrid) -> Result<ScatteringGrid, String> {
    let mut b = Vec::new();
    let mut mask = Vec::new();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err("scattering csv: expected 5 columns".into());
        }
        let re: f64 = cols[2].parse().map_err(|_| "bad re_b")?;
        let im: f64 = cols[3].parse().map_err(|_| "bad im_b")?;
        b.push(c64(re, im));
        mask.push(cols[4].trim() == "1");
    }
    if b.len() != lgrid.len() {
        return Err("scattering csv: node count mismatch".into());
    }
    Ok(ScatteringGrid {
        lgrid: lgrid.clone(),
        b,
        exceptional_mask: mask,
        method: eit_core::scattering::ScatterForm::BoundaryForm,
    })
}

/// Kernel cache: little-endian header (re lambda, im lambda: f64; n, and
/// resolution: u64; h, truncation: f64), then re/im pairs row-major.
pub fn write_kernel_cache(path: &Path, t: &FaddeevGreenTable) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&t.lambda.re.to_le_bytes())?;
    f.write_all(&t.lambda.im.to_le_bytes())?;
    f.write_all(&(t.n as u64).to_le_bytes())?;
    f.write_all(&(t.resolution as u64).to_le_bytes())?;
    f.write_all(&t.h.to_le_bytes())?;
    f.write_all(&t.truncation.to_le_bytes())?;
    for v in &t.values {
        f.write_all(&v.re.to_le_bytes())?;
        f.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_kernel_cache(path: &Path) -> std::io::Result<FaddeevGreenTable> {
    let bytes = fs::read(path)?;
    let rd = |o: usize| -> f64 { f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap()) };
    let rdu = |o: usize| -> u64 { u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap()) };
    let lambda = c64(rd(0), rd(8));
    let n = rdu(16) as usize;
    let resolution = rdu(24) as usize;
    let h = rd(32);
    let truncation = rd(40);
    let side = 2 * n - 1;
    let mut values = Vec::with_capacity(side * side);
    for k in 0..side * side {
        let o = 48 + 16 * k;
        values.push(c64(rd(o), rd(o + 8)));
    }
    Ok(FaddeevGreenTable { lambda, n, h, values, singular_center: true, truncation, resolution })
}

/// Curve coefficient file: `i j re im` per line, `#` comments.
pub fn parse_curve_file(text: &str) -> Result<BivarPoly, String> {
    let mut terms = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 4 {
            return Err(format!("curve file line {}: expected 'i j re im'", ln + 1));
        }
        let i: usize = cols[0].parse().map_err(|_| "bad exponent")?;
        let j: usize = cols[1].parse().map_err(|_| "bad exponent")?;
        let re: f64 = cols[2].parse().map_err(|_| "bad coefficient")?;
        let im: f64 = cols[3].parse().map_err(|_| "bad coefficient")?;
        terms.push((i, j, c64(re, im)));
    }
    if terms.is_empty() {
        return Err("curve file: no terms".into());
    }
    Ok(BivarPoly::from_terms(&terms))
}

/// Diverging blue-white-red map: t in [-1, 1] -> RGB.
fn diverging(t: f64) -> [u8; 3] {
    let t = t.clamp(-1.0, 1.0);
    let lerp = |a: f64, b: f64, s: f64| (a + (b - a) * s) as u8;
    if t < 0.0 {
        let s = 1.0 + t; // 0 at full blue, 1 at white
        [lerp(33.0, 255.0, s), lerp(102.0, 255.0, s), lerp(172.0, 255.0, s)]
    } else {
        [lerp(255.0, 178.0, t), lerp(255.0, 24.0, t), lerp(255.0, 43.0, t)]
    }
}

/// Rasterize a disk-grid field to a P6 heatmap (nearest-node sampling, white
/// outside the disk), values mapped by the diverging map centered at
/// `center` with half-span `span`.
pub fn heatmap_ppm(grid: &DiskGrid, f: &[f64], px: usize, center: f64, span: f64) -> Vec<u8> {
    let mut out = format!("P6\n{px} {px}\n255\n").into_bytes();
    let nt = grid.n_angular;
    let nr = grid.n_radial;
    for iy in 0..px {
        let y = 1.0 - 2.0 * (iy as f64 + 0.5) / px as f64;
        for ix in 0..px {
            let x = -1.0 + 2.0 * (ix as f64 + 0.5) / px as f64;
            let r = f64::sqrt(x * x + y * y);
            if r >= 1.0 {
                out.extend_from_slice(&[255, 255, 255]);
                continue;
            }
            let j = (((r * nr as f64) - 0.5).round().max(0.0) as usize).min(nr - 1);
            let mut t = f64::atan2(y, x);
            if t < 0.0 {
                t += core::f64::consts::TAU;
            }
            let k = ((t / core::f64::consts::TAU * nt as f64).round() as usize) % nt;
            let v = f[j * nt + k];
            let s = if span > 0.0 { (v - center) / span } else { 0.0 };
            out.extend_from_slice(&diverging(s));
        }
    }
    out
}

/// Run manifest: one `stage key=value` line per metric.
#[derive(Default)]
pub struct Manifest {
    lines: Vec<String>,
}

impl Manifest {
    pub fn record(&mut self, stage: &str, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{stage} {key}={value}"));
    }

    pub fn record_ms(&mut self, stage: &str, t: std::time::Instant) {
        self.lines.push(format!("{stage} wall_ms={}", t.elapsed().as_millis()));
    }

    pub fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use eit_core::mesh::build_disk_grid;

    #[test]
    fn csv_values_round_trip_exactly() {
        let x = -0.123456789012345678e-3;
        let s = g17(x);
        let back: f64 = s.parse().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn kernel_cache_round_trips() {
        let t = FaddeevGreenTable::from_closed_form(c64(1.0, 0.5), 4, 0.25);
        let dir = std::env::temp_dir().join("eit_cache_test");
        let path = dir.join("k.bin");
        write_kernel_cache(&path, &t).unwrap();
        let r = read_kernel_cache(&path).unwrap();
        assert_eq!(r.n, t.n);
        assert_eq!(r.values, t.values);
        assert_eq!(r.lambda, t.lambda);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn curve_file_parses_and_rejects_garbage() {
        let p = parse_curve_file("# c\n2 0 1.0 0.0\n0 2 1.0 0.0\n0 0 -1.0 0.0\n").unwrap();
        assert_eq!(p.total_degree(), 2);
        assert!(parse_curve_file("2 0 1.0\n").is_err());
        assert!(parse_curve_file("").is_err());
    }

    #[test]
    fn ppm_has_correct_header_and_size() {
        let g = build_disk_grid(8, 16).unwrap();
        let f = vec![1.0; g.len()];
        let img = heatmap_ppm(&g, &f, 32, 1.0, 0.5);
        assert!(img.starts_with(b"P6\n32 32\n255\n"));
        assert_eq!(img.len(), 13 + 3 * 32 * 32);
    }
}
