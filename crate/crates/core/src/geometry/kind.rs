use serde::{Deserialize, Serialize};

use crate::error::LatticeError;
use crate::geometry::build::{build_decoding_graph, LatticeGraph};
use crate::geometry::graph::GraphKind;
use crate::geometry::lattice::{build_lattice, DefectLayout, LatticeParams, SurfaceLattice};

/// Which logical failure is being estimated.
///
/// Loop-like failures wrap a single defect and live on the phase-kind graph;
/// path-like failures join two defects and live on the bit-kind graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Loop,
    Path,
}

impl ErrorKind {
    pub fn graph_kind(self) -> GraphKind {
        match self {
            ErrorKind::Loop => GraphKind::Phase,
            ErrorKind::Path => GraphKind::Bit,
        }
    }

    pub fn layout(self) -> DefectLayout {
        match self {
            ErrorKind::Loop => DefectLayout::Single,
            ErrorKind::Path => DefectLayout::Double,
        }
    }

    /// Lattice parameters with the given defect size, separation and buffer.
    pub fn params(self, r: usize, s: usize, b: usize) -> LatticeParams {
        match self {
            ErrorKind::Loop => LatticeParams::single(r, b),
            ErrorKind::Path => LatticeParams::double(r, s, b),
        }
    }

    /// Builds the lattice and its decoding graph for this kind of failure.
    pub fn build(
        self,
        r: usize,
        s: usize,
        b: usize,
    ) -> Result<(SurfaceLattice, LatticeGraph), LatticeError> {
        let lattice = build_lattice(self.params(r, s, b))?;
        let graph = build_decoding_graph(&lattice, self.graph_kind())?;
        Ok((lattice, graph))
    }
}

impl std::fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ErrorKind::Loop => "loop",
            ErrorKind::Path => "path",
        })
    }
}

impl std::str::FromStr for ErrorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "loop" => Ok(ErrorKind::Loop),
            "path" => Ok(ErrorKind::Path),
            _ => Err(format!("unknown error kind '{s}' (expected loop or path)")),
        }
    }
}
