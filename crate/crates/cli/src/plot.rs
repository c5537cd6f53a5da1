//! Sample points for plotting clouds in the plane or in space. Each row has
//! float coordinates for plotting tools and the exact rationals alongside.

use std::fmt;
use std::path::{Path, PathBuf};

use cloudcover::sampling::points_on_cloud;
use cloudcover::scalar::{fmt_scalar, to_f64};
use cloudcover::{Cloud, Point};

/// Grid sizes: `primary` along the first sphere parameter, `secondary`
/// along the second (spheres in space) and along cylinder fibers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlotSpec {
    pub primary: usize,
    pub secondary: usize,
}

impl Default for PlotSpec {
    fn default() -> Self {
        Self { primary: 32, secondary: 8 }
    }
}

#[derive(Debug)]
pub enum PlotError {
    UnsupportedDim(usize),
    Sampling(cloudcover::Error),
}

impl fmt::Display for PlotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlotError::UnsupportedDim(d) => write!(f, "plots need dimension 2 or 3, cloud has dimension {d}"),
            PlotError::Sampling(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for PlotError {}

/// Exact points of the cloud on the given grid; `points_on_cloud` drops
/// punctures, so every row is a member.
pub fn plot_points(cloud: &Cloud, spec: PlotSpec) -> Result<Vec<Point>, PlotError> {
    let d = cloud.dim();
    if !(2..=3).contains(&d) {
        return Err(PlotError::UnsupportedDim(d));
    }
    points_on_cloud(cloud, spec.primary, spec.secondary).map_err(PlotError::Sampling)
}

/// CSV text with columns `x,y[,z]` and `x_exact,y_exact[,z_exact]`.
pub fn plot_csv(cloud: &Cloud, spec: PlotSpec) -> Result<String, PlotError> {
    let points = plot_points(cloud, spec)?;
    let axes = &["x", "y", "z"][..cloud.dim()];
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = axes.iter().map(|a| a.to_string()).chain(axes.iter().map(|a| format!("{a}_exact"))).collect();
    w.write_record(&header).expect("in-memory write");
    for p in &points {
        let row: Vec<String> = p
            .coords()
            .iter()
            .map(|c| to_f64(c).to_string())
            .chain(p.coords().iter().map(fmt_scalar))
            .collect();
        w.write_record(&row).expect("in-memory write");
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields"))
}

/// Writes `plot_<name>.csv` into `dir`.
pub fn emit_plot_data(dir: &Path, name: &str, cloud: &Cloud, spec: PlotSpec) -> anyhow::Result<PathBuf> {
    let text = plot_csv(cloud, spec)?;
    let path = dir.join(format!("plot_{name}.csv"));
    std::fs::create_dir_all(dir)?;
    std::fs::write(&path, text)?;
    Ok(path)
}
