//! JSON form of a point cloud:
//! `{"dim":2,"window":[[x0,y0],[x1,y1]],"points":[[x,y],...]}`.

use std::fs;
use std::path::Path;

use perforate_core::{PointCloud, Window};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudFile {
    pub dim: usize,
    pub window: [Vec<f64>; 2],
    pub points: Vec<Vec<f64>>,
}

impl CloudFile {
    pub fn from_cloud(cloud: &PointCloud) -> Self {
        let d = cloud.dim();
        let w = cloud.window();
        CloudFile {
            dim: d,
            window: [w.lo[..d].to_vec(), w.hi[..d].to_vec()],
            points: cloud.points().iter().map(|p| p[..d].to_vec()).collect(),
        }
    }

    pub fn to_cloud(&self) -> Result<PointCloud> {
        let d = self.dim;
        if self.window[0].len() != d || self.window[1].len() != d {
            return Err(Error::Format(format!("window corners must have {d} coordinates")));
        }
        let window = Window::new(d, &self.window[0], &self.window[1])?;
        let mut points = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::Format(format!("point {i} has {} coordinates, expected {d}", p.len())));
            }
            let mut q = [0.0; 3];
            q[..d].copy_from_slice(p);
            points.push(q);
        }
        Ok(PointCloud::new(window, points)?)
    }
}

pub fn cloud_to_json(cloud: &PointCloud) -> Vec<u8> {
    let mut out = serde_json::to_vec(&CloudFile::from_cloud(cloud)).expect("cloud serializes");
    out.push(b'\n');
    out
}

pub fn cloud_from_json(bytes: &[u8]) -> Result<PointCloud> {
    let file: CloudFile = serde_json::from_slice(bytes).map_err(|e| Error::json("cloud", e))?;
    file.to_cloud()
}

pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    cloud_from_json(&bytes).map_err(|e| match e {
        Error::Json { source, .. } => Error::json(path.display().to_string(), source),
        other => other,
    })
}

pub fn write_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    crate::write_file(path, &cloud_to_json(cloud))
}
