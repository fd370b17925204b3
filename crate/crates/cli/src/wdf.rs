//! Window files: `{"L": int, "a": int, "b": int, "data": [[re, im], ...]}`.

use std::fs;
use std::path::Path;

use gabor_tight::{GaborSystem, Lattice, Signal, C64};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFile {
    #[serde(rename = "L")]
    pub len: usize,
    pub a: usize,
    pub b: usize,
    pub data: Vec<[f64; 2]>,
}

impl WindowFile {
    pub fn from_system(sys: &GaborSystem) -> Self {
        let lat = sys.lattice();
        WindowFile {
            len: lat.len(),
            a: lat.a(),
            b: lat.b(),
            data: sys.window().as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn into_system(self) -> Result<GaborSystem, Failure> {
        if self.data.len() != self.len {
            return Err(Failure::usage(format!(
                "window data has {} samples, header says L = {}",
                self.data.len(),
                self.len
            )));
        }
        let lat = Lattice::new(self.len, self.a, self.b)?;
        let signal = Signal::new(self.data.iter().map(|[re, im]| C64::new(*re, *im)).collect());
        Ok(GaborSystem::new(signal, lat)?)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::usage(format!("invalid window file: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string(self).expect("window file serializes");
        text.push('\n');
        text
    }
}

pub fn read(path: &Path) -> Result<GaborSystem, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    WindowFile::parse(&text)?.into_system()
}

pub fn write(path: &Path, sys: &GaborSystem) -> Result<(), Failure> {
    fs::write(path, WindowFile::from_system(sys).to_json())
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}
