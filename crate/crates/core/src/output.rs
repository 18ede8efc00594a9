//! Number formatting and CSV writers for plot-ready output.

use std::io::Write;

use crate::closed_form::PeriodicOrbit;
use crate::model::State;
use crate::simulate::{BasinGrid, SweepRow, Trajectory};

/// Formats a double with 17 significant digits; infinities become `inf`/`-inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v:.16e}")
    }
}

/// `t,G,T,event`. Each fire contributes its pre-fire row and a post-fire row
/// tagged `fire` at the same time.
pub fn write_trajectory<W: Write>(w: W, traj: &Trajectory) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "G", "T", "event"])?;
    let mut fires = traj.impulses.iter().peekable();
    for s in &traj.states {
        if let Some(rec) = fires.peek() {
            if rec.time == s.time {
                let pre = rec.pre;
                out.write_record([fmt_f64(pre.time), fmt_f64(pre.grass), fmt_f64(pre.tree), String::new()])?;
                out.write_record([fmt_f64(s.time), fmt_f64(s.grass), fmt_f64(s.tree), "fire".to_string()])?;
                fires.next();
                continue;
            }
        }
        out.write_record([fmt_f64(s.time), fmt_f64(s.grass), fmt_f64(s.tree), String::new()])?;
    }
    out.flush()?;
    Ok(())
}

/// `t,G,T,event` over one period of an orbit: phases in `[0, τ)`, then the
/// pre-fire state at `τ` and the post-fire state tagged `fire`.
pub fn write_orbit<W: Write>(w: W, orbit: &PeriodicOrbit, pre: &State, post: &State) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "G", "T", "event"])?;
    for s in &orbit.samples {
        out.write_record([fmt_f64(s.time), fmt_f64(s.grass), fmt_f64(s.tree), String::new()])?;
    }
    out.write_record([fmt_f64(pre.time), fmt_f64(pre.grass), fmt_f64(pre.tree), String::new()])?;
    out.write_record([fmt_f64(post.time), fmt_f64(post.grass), fmt_f64(post.tree), "fire".to_string()])?;
    out.flush()?;
    Ok(())
}

/// `G0,T0,attractor,periods`, row-major with the grass axis varying fastest.
pub fn write_basin<W: Write>(w: W, grid: &BasinGrid) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["G0", "T0", "attractor", "periods"])?;
    for cell in &grid.cells {
        out.write_record([
            fmt_f64(cell.g0),
            fmt_f64(cell.t0),
            cell.verdict.kind.as_str().to_string(),
            cell.verdict.periods_to_converge.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `value,R01,RpulseGe,RtildeR01,RpulseStar,RstableStar,RtildeStableStar2,case,attractors`.
/// Failed values carry the error message in the `case` column.
pub fn write_sweep<W: Write>(w: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "value",
        "R01",
        "RpulseGe",
        "RtildeR01",
        "RpulseStar",
        "RstableStar",
        "RtildeStableStar2",
        "case",
        "attractors",
    ])?;
    for row in rows {
        let mut rec = vec![fmt_f64(row.value)];
        match &row.outcome {
            Ok(res) => {
                rec.extend(res.thresholds.named().iter().map(|(_, t)| t.to_string()));
                rec.push(res.regime.case_label.to_string());
                let kinds: Vec<&str> = res.attractors.iter().map(|k| k.as_str()).collect();
                rec.push(kinds.join(";"));
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 6));
                rec.push(format!("error: {e}"));
                rec.push(String::new());
            }
        }
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1.9996, 6.02214076e23, -2.5e-300] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }
}
