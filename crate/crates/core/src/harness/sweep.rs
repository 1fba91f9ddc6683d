//! Weyl-family sweeps over a list of nonreal points, exported as CSV.

use serde::{Deserialize, Serialize};

use crate::boundary::{main_transform, spectral_sets, weyl, BoundaryPair};
use super::gen::Instance;
use crate::error::{Error, Result};
use crate::numkernel::C64;
use crate::relcalc::in_resolvent;

/// CSV columns, in order.
pub const SWEEP_COLUMNS: [&str; 8] =
    ["re_z", "im_z", "dim_M", "dim_mul", "dim_ker", "is_operator", "in_sigma", "in_res_main"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub re_z: f64,
    pub im_z: f64,
    #[serde(rename = "dim_M")]
    pub dim_m: usize,
    pub dim_mul: usize,
    pub dim_ker: usize,
    pub is_operator: bool,
    pub in_sigma: bool,
    pub in_res_main: bool,
}

pub fn weyl_sweep(bp: &BoundaryPair, points: &[C64]) -> Result<Vec<SweepRow>> {
    if let Some(z) = points.iter().find(|z| z.im == 0.0) {
        return Err(Error::RealParameter(format!("sweep point {z} is real")));
    }
    let sets = spectral_sets(bp, 1.0, points)?;
    let a = main_transform(bp);
    let rows = crate::exec::map_collect(points, |&z| -> Result<SweepRow> {
        let m = weyl(bp, z)?.m;
        Ok(SweepRow {
            re_z: z.re,
            im_z: z.im,
            dim_m: m.dim(),
            dim_mul: m.mul().dim(),
            dim_ker: m.ker().dim(),
            is_operator: m.is_operator(),
            in_sigma: false,
            in_res_main: in_resolvent(&a, z, bp.tol())?,
        })
    });
    rows.into_iter()
        .zip(&sets.samples)
        .map(|(r, s)| r.map(|row| SweepRow { in_sigma: s.in_sigma, ..row }))
        .collect()
}

/// Evenly spaced points on a horizontal segment at height `im`.
pub fn line_points(re_lo: f64, re_hi: f64, im: f64, count: usize) -> Vec<C64> {
    match count {
        0 => Vec::new(),
        1 => vec![C64::new(re_lo, im)],
        _ => (0..count)
            .map(|k| C64::new(re_lo + (re_hi - re_lo) * k as f64 / (count - 1) as f64, im))
            .collect(),
    }
}

/// `nx × ny` lattice in `[re_lo, re_hi] × [im_lo, im_hi]`, row by row in the imaginary part.
pub fn lattice_points(re: (f64, f64), im: (f64, f64), nx: usize, ny: usize) -> Vec<C64> {
    let ims: Vec<f64> = line_points(im.0, im.1, 0.0, ny).iter().map(|p| p.re).collect();
    ims.iter().flat_map(|&y| line_points(re.0, re.1, y, nx)).collect()
}

/// A boundary pair from JSON: either a bare pair or a generated instance that carries one.
pub fn pair_from_json(text: &str) -> Result<BoundaryPair> {
    if let Ok(inst) = serde_json::from_str::<Instance>(text) {
        return inst
            .boundary_pair()
            .cloned()
            .ok_or_else(|| Error::Malformed(format!("instance of flavor {} carries no boundary pair", inst.flavor().name())));
    }
    Ok(serde_json::from_str::<BoundaryPair>(text)?)
}

pub fn write_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(SWEEP_COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_sweep_round_trips() {
        let bp = BoundaryPair::identity_obt(2);
        let pts = line_points(-1.0, 1.0, 0.5, 5);
        let rows = weyl_sweep(&bp, &pts).unwrap();
        assert!(rows.iter().all(|r| r.is_operator && r.dim_m == 2 && r.in_res_main));
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&SWEEP_COLUMNS.join(",")));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn lattice_and_instance_loading() {
        let pts = lattice_points((-2.0, 2.0), (0.5, 2.0), 5, 5);
        assert_eq!(pts.len(), 25);
        assert!(pts.iter().all(|z| z.im >= 0.5 && z.im <= 2.0 && z.re.abs() <= 2.0));
        let rows = weyl_sweep(&BoundaryPair::identity_obt(1), &pts).unwrap();
        assert!(rows.iter().all(|r| r.dim_m == 1 && r.dim_mul == 0 && r.dim_ker == 0));

        let flip = BoundaryPair::flip_fixture(1);
        let text = serde_json::to_string(&Instance::UnitaryBp(flip)).unwrap();
        let back = pair_from_json(&text).unwrap();
        assert!(weyl_sweep(&back, &pts).unwrap().iter().all(|r| !r.in_res_main));
        let bare = serde_json::to_string(&BoundaryPair::identity_obt(2)).unwrap();
        assert_eq!(pair_from_json(&bare).unwrap().n(), 2);
        assert!(pair_from_json("{}").is_err());
    }

    #[test]
    fn real_points_are_rejected() {
        let bp = BoundaryPair::identity_obt(1);
        assert!(matches!(weyl_sweep(&bp, &[C64::new(1.0, 0.0)]), Err(Error::RealParameter(_))));
    }
}
