//! CSV and JSON writers. Floats carry 17 significant digits; missing
//! values are written as `nan`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::json;

use super::{RunReport, Scenario};

/// Paths written by one run, in creation order.
#[derive(Debug, Clone, Default)]
pub struct OutputFiles {
    pub paths: Vec<PathBuf>,
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

fn tag(axis: &str, value: Option<f64>) -> String {
    value.map(|v| format!("_{axis}_{v}")).unwrap_or_default()
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

pub(crate) fn write_matrix(path: &Path, m: &DMatrix<Complex64>) -> std::io::Result<()> {
    let mut s = String::from("i,j,re,im\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let _ = writeln!(s, "{i},{j},{},{}", num(m[(i, j)].re), num(m[(i, j)].im));
        }
    }
    std::fs::write(path, s)
}

struct Writer<'a> {
    dir: &'a Path,
    files: OutputFiles,
}

impl Writer<'_> {
    fn write(&mut self, name: String, body: String) -> std::io::Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, body)?;
        self.files.paths.push(path);
        Ok(())
    }
}

/// Writes
///
/// * `dist[_<axis>_<value>].csv` — `m,p` for one state, `m,p_<label>,...`
///   for several (first detector);
/// * `joint_<label>[_<axis>_<value>].csv` — `m,n,p` with two detectors;
/// * `sweep_<label>.csv` — `axis_value,mean,variance,corr,pearson,variance_per_site`;
/// * `a_elements.csv` — `axis_value,a_ii,abs_a_i_i1,abs_a_i_i2,abs_a_i_i3`;
/// * `summary.json`.
pub fn write_outputs(scenario: &Scenario, report: &RunReport, dir: &Path) -> std::io::Result<OutputFiles> {
    std::fs::create_dir_all(dir)?;
    let mut out = Writer { dir, files: OutputFiles::default() };
    let axis = report.axis.map(|a| a.label()).unwrap_or("");
    let axis_value = |v: Option<f64>| v.map(num).unwrap_or_else(|| "nan".into());

    if scenario.output.distributions && !scenario.states.is_empty() {
        for point in &report.points {
            let states = &point.states;
            let rows = states.iter().map(|s| s.distribution.probabilities.len()).max().unwrap_or(0);
            let mut s = String::from("m");
            if states.len() == 1 {
                s.push_str(",p");
            } else {
                for st in states {
                    let _ = write!(s, ",p_{}", st.label);
                }
            }
            s.push('\n');
            for m in 0..rows {
                s.push_str(&m.to_string());
                for st in states {
                    let _ = write!(s, ",{}", num(st.distribution.get(m)));
                }
                s.push('\n');
            }
            out.write(format!("dist{}.csv", tag(axis, point.axis_value)), s)?;
            for st in states {
                if let Some(joint) = &st.joint {
                    let mut s = String::from("m,n,p\n");
                    for (m, n, p) in joint.entries() {
                        let _ = writeln!(s, "{m},{n},{}", num(p));
                    }
                    out.write(format!("joint_{}{}.csv", st.label, tag(axis, point.axis_value)), s)?;
                }
            }
        }
    }

    if report.axis.is_some() {
        for (k, spec) in scenario.states.iter().enumerate() {
            let mut s = String::from("axis_value,mean,variance,corr,pearson,variance_per_site\n");
            for point in &report.points {
                let st = &point.states[k];
                let d = &st.distribution;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    axis_value(point.axis_value),
                    num(d.mean),
                    num(d.variance),
                    num(st.corr()),
                    num(st.pearson()),
                    num(d.variance / report.sites as f64)
                );
            }
            out.write(format!("sweep_{}.csv", spec.label), s)?;
        }
    }

    if scenario.output.a_elements {
        let mut s = String::from("axis_value,a_ii,abs_a_i_i1,abs_a_i_i2,abs_a_i_i3\n");
        for point in &report.points {
            if let Some(e) = point.a_elements {
                let _ = writeln!(s, "{},{},{},{},{}", axis_value(point.axis_value), num(e[0]), num(e[1]), num(e[2]), num(e[3]));
            }
        }
        out.write("a_elements.csv".into(), s)?;
    }

    let points: Vec<_> = report
        .points
        .iter()
        .map(|p| {
            let states: Vec<_> = p
                .states
                .iter()
                .map(|st| {
                    let d = &st.distribution;
                    let mut v = json!({
                        "label": st.label,
                        "mean": d.mean,
                        "variance": d.variance,
                        "fano": finite_or_null(d.fano_factor()),
                        "max_count": d.max_count(),
                        "p0": d.get(0),
                        "nn_mean": st.nn_mean,
                    });
                    if let Some(j) = &st.joint {
                        let m = j.moments();
                        v["second"] = json!({ "mean": m.mean[1], "variance": m.variance[1] });
                        v["covariance"] = json!(m.covariance);
                        v["corr"] = finite_or_null(st.corr());
                        v["pearson"] = finite_or_null(st.pearson());
                    }
                    v
                })
                .collect();
            json!({
                "axis_value": p.axis_value,
                "detectors": p.detectors.iter().map(|d| json!({
                    "center_m": d.center, "edges_m": d.edges, "kappa": d.kappa,
                })).collect::<Vec<_>>(),
                "correlation_matrices": p.matrices,
                "a_elements": p.a_elements,
                "states": states,
            })
        })
        .collect();
    let summary = json!({
        "name": report.name,
        "mode": report.mode,
        "sites": report.sites,
        "dims": scenario.geometry.dims,
        "spacing_m": scenario.geometry.spacing,
        "sweep_axis": report.axis.map(|a| a.label()),
        "onsite_only": scenario.counting.onsite_only,
        "points": points,
    });
    let body = serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?;
    out.write("summary.json".into(), body + "\n")?;
    Ok(out.files)
}
