use serde::{Deserialize, Serialize};

use crate::error::LatticeError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectLayout {
    Single,
    Double,
}

impl DefectLayout {
    pub fn count(self) -> usize {
        match self {
            DefectLayout::Single => 1,
            DefectLayout::Double => 2,
        }
    }
}

/// Geometry of a planar surface code with square smooth defects.
///
/// `r` is the defect side in plaquettes, `s` the dual distance between the two
/// defects and `b` the dual distance from a defect to the external boundary.
/// Dual distances count the edges a straight dual path crosses, so `s - 1`
/// plaquettes separate the defects and `b - 1` separate a defect from the edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeParams {
    pub r: usize,
    pub s: usize,
    pub b: usize,
    pub layout: DefectLayout,
}

impl LatticeParams {
    pub fn single(r: usize, b: usize) -> Self {
        Self {
            r,
            s: b,
            b,
            layout: DefectLayout::Single,
        }
    }

    pub fn double(r: usize, s: usize, b: usize) -> Self {
        Self {
            r,
            s,
            b,
            layout: DefectLayout::Double,
        }
    }

    /// Geometry where the separations equal the loop length `4r`.
    pub fn standard(r: usize, layout: DefectLayout) -> Self {
        Self {
            r,
            s: 4 * r,
            b: 4 * r,
            layout,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    North,
    West,
    East,
    South,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::West,
        Direction::East,
        Direction::South,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeSide {
    Interior,
    External,
    Defect(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeEdge {
    pub orientation: Orientation,
    pub row: usize,
    pub col: usize,
    /// Endpoint site ids (west/north first).
    pub sites: [usize; 2],
    /// Retained plaquettes on either side (north/west first).
    pub plaquettes: [Option<usize>; 2],
    pub side: EdgeSide,
}

/// The data-qubit lattice: retained sites (primal vertices), edges (qubits)
/// and plaquettes (dual vertices), all numbered row-major.
#[derive(Clone, Debug)]
pub struct SurfaceLattice {
    params: LatticeParams,
    rows: usize,
    cols: usize,
    defect_origins: Vec<(usize, usize)>,
    site_ids: Vec<Option<usize>>,
    sites: Vec<(usize, usize)>,
    plaquette_ids: Vec<Option<usize>>,
    plaquettes: Vec<(usize, usize)>,
    h_ids: Vec<Option<usize>>,
    v_ids: Vec<Option<usize>>,
    edges: Vec<LatticeEdge>,
}

pub fn build_lattice(params: LatticeParams) -> Result<SurfaceLattice, LatticeError> {
    SurfaceLattice::new(params)
}

impl SurfaceLattice {
    pub fn new(params: LatticeParams) -> Result<Self, LatticeError> {
        let LatticeParams { r, s, b, layout } = params;
        if r == 0 {
            return Err(LatticeError::EmptyDefect);
        }
        if b < 2 {
            return Err(LatticeError::TouchesBoundary(b));
        }
        if layout == DefectLayout::Double && s < 2 {
            return Err(LatticeError::DefectsOverlap(s));
        }
        if r < 2 {
            log::warn!("defect size r = {r} is below the regime where the rate ansatz applies");
        }
        let rows = 2 * (b - 1) + r;
        let mut defect_origins = vec![(b - 1, b - 1)];
        let cols = match layout {
            DefectLayout::Single => rows,
            DefectLayout::Double => {
                defect_origins.push((b - 1, b - 1 + r + s - 1));
                2 * (b - 1) + 2 * r + s - 1
            }
        };

        let in_defect_plaquette = |y: usize, x: usize| {
            defect_origins
                .iter()
                .position(|&(y0, x0)| y >= y0 && y < y0 + r && x >= x0 && x < x0 + r)
        };
        let interior_site = |y: usize, x: usize| {
            defect_origins
                .iter()
                .any(|&(y0, x0)| y > y0 && y < y0 + r && x > x0 && x < x0 + r)
        };

        let mut plaquette_ids = vec![None; rows * cols];
        let mut plaquettes = Vec::new();
        for y in 0..rows {
            for x in 0..cols {
                if in_defect_plaquette(y, x).is_none() {
                    plaquette_ids[y * cols + x] = Some(plaquettes.len());
                    plaquettes.push((y, x));
                }
            }
        }

        let mut site_ids = vec![None; (rows + 1) * (cols + 1)];
        let mut sites = Vec::new();
        for y in 0..=rows {
            for x in 0..=cols {
                if !interior_site(y, x) {
                    site_ids[y * (cols + 1) + x] = Some(sites.len());
                    sites.push((y, x));
                }
            }
        }

        let plaquette_at = |y: isize, x: isize| -> (Option<usize>, Option<usize>) {
            // (retained id, defect index) of the plaquette at (y, x)
            if y < 0 || x < 0 || y >= rows as isize || x >= cols as isize {
                return (None, None);
            }
            let (y, x) = (y as usize, x as usize);
            (plaquette_ids[y * cols + x], in_defect_plaquette(y, x))
        };
        let classify = |a: (Option<usize>, Option<usize>), b: (Option<usize>, Option<usize>)| {
            match (a, b) {
                ((Some(_), _), (Some(_), _)) => Some(EdgeSide::Interior),
                ((None, Some(d)), (Some(_), _)) | ((Some(_), _), (None, Some(d))) => {
                    Some(EdgeSide::Defect(d))
                }
                ((None, None), (Some(_), _)) | ((Some(_), _), (None, None)) => {
                    Some(EdgeSide::External)
                }
                // both sides missing: the edge lies inside a defect
                _ => None,
            }
        };

        let mut h_ids = vec![None; (rows + 1) * cols];
        let mut v_ids = vec![None; rows * (cols + 1)];
        let mut edges = Vec::new();
        for y in 0..=rows {
            for x in 0..cols {
                let above = plaquette_at(y as isize - 1, x as isize);
                let below = plaquette_at(y as isize, x as isize);
                if let Some(side) = classify(above, below) {
                    let a = site_ids[y * (cols + 1) + x].expect("edge endpoint retained");
                    let c = site_ids[y * (cols + 1) + x + 1].expect("edge endpoint retained");
                    h_ids[y * cols + x] = Some(edges.len());
                    edges.push(LatticeEdge {
                        orientation: Orientation::Horizontal,
                        row: y,
                        col: x,
                        sites: [a, c],
                        plaquettes: [above.0, below.0],
                        side,
                    });
                }
            }
            if y == rows {
                break;
            }
            for x in 0..=cols {
                let left = plaquette_at(y as isize, x as isize - 1);
                let right = plaquette_at(y as isize, x as isize);
                if let Some(side) = classify(left, right) {
                    let a = site_ids[y * (cols + 1) + x].expect("edge endpoint retained");
                    let c = site_ids[(y + 1) * (cols + 1) + x].expect("edge endpoint retained");
                    v_ids[y * (cols + 1) + x] = Some(edges.len());
                    edges.push(LatticeEdge {
                        orientation: Orientation::Vertical,
                        row: y,
                        col: x,
                        sites: [a, c],
                        plaquettes: [left.0, right.0],
                        side,
                    });
                }
            }
        }

        Ok(Self {
            params,
            rows,
            cols,
            defect_origins,
            site_ids,
            sites,
            plaquette_ids,
            plaquettes,
            h_ids,
            v_ids,
            edges,
        })
    }

    pub fn params(&self) -> LatticeParams {
        self.params
    }

    /// Plaquette rows and columns of the bounding rectangle.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Top-left plaquette coordinate of each defect.
    pub fn defect_origins(&self) -> &[(usize, usize)] {
        &self.defect_origins
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn num_plaquettes(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[LatticeEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &LatticeEdge {
        &self.edges[e]
    }

    pub fn site_coord(&self, s: usize) -> (usize, usize) {
        self.sites[s]
    }

    pub fn plaquette_coord(&self, p: usize) -> (usize, usize) {
        self.plaquettes[p]
    }

    pub fn site_id(&self, y: usize, x: usize) -> Option<usize> {
        if y > self.rows || x > self.cols {
            return None;
        }
        self.site_ids[y * (self.cols + 1) + x]
    }

    pub fn plaquette_id(&self, y: usize, x: usize) -> Option<usize> {
        if y >= self.rows || x >= self.cols {
            return None;
        }
        self.plaquette_ids[y * self.cols + x]
    }

    /// Horizontal edge between sites (y, x) and (y, x + 1).
    pub fn horizontal(&self, y: usize, x: usize) -> Option<usize> {
        if y > self.rows || x >= self.cols {
            return None;
        }
        self.h_ids[y * self.cols + x]
    }

    /// Vertical edge between sites (y, x) and (y + 1, x).
    pub fn vertical(&self, y: usize, x: usize) -> Option<usize> {
        if y >= self.rows || x > self.cols {
            return None;
        }
        self.v_ids[y * (self.cols + 1) + x]
    }

    /// The edge on side `dir` of plaquette `p`.
    pub fn plaquette_edge(&self, p: usize, dir: Direction) -> Option<usize> {
        let (y, x) = self.plaquettes[p];
        match dir {
            Direction::North => self.horizontal(y, x),
            Direction::South => self.horizontal(y + 1, x),
            Direction::West => self.vertical(y, x),
            Direction::East => self.vertical(y, x + 1),
        }
    }

    /// The edge leaving site `s` in direction `dir`.
    pub fn site_edge(&self, s: usize, dir: Direction) -> Option<usize> {
        let (y, x) = self.sites[s];
        match dir {
            Direction::North => y.checked_sub(1).and_then(|y| self.vertical(y, x)),
            Direction::South => self.vertical(y, x),
            Direction::West => x.checked_sub(1).and_then(|x| self.horizontal(y, x)),
            Direction::East => self.horizontal(y, x),
        }
    }

    /// Retained edges of plaquette `p`.
    pub fn plaquette_boundary(&self, p: usize) -> Vec<usize> {
        Direction::ALL
            .iter()
            .filter_map(|&d| self.plaquette_edge(p, d))
            .collect()
    }

    /// Retained edges incident to site `s`.
    pub fn site_star(&self, s: usize) -> Vec<usize> {
        Direction::ALL
            .iter()
            .filter_map(|&d| self.site_edge(s, d))
            .collect()
    }

    /// Edges on the boundary of defect `k`, in row-major order.
    pub fn defect_boundary(&self, k: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].side == EdgeSide::Defect(k))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_touching_geometries() {
        assert_eq!(
            build_lattice(LatticeParams::single(2, 1)).unwrap_err(),
            LatticeError::TouchesBoundary(1)
        );
        assert_eq!(
            build_lattice(LatticeParams::double(2, 1, 3)).unwrap_err(),
            LatticeError::DefectsOverlap(1)
        );
        assert_eq!(
            build_lattice(LatticeParams::single(0, 3)).unwrap_err(),
            LatticeError::EmptyDefect
        );
    }

    #[test]
    fn single_defect_counts() {
        // r = 1, b = 2: 3x3 plaquettes with the centre removed, no interior sites.
        let lat = build_lattice(LatticeParams::single(1, 2)).unwrap();
        assert_eq!(lat.shape(), (3, 3));
        assert_eq!(lat.num_plaquettes(), 8);
        assert_eq!(lat.num_sites(), 16);
        assert_eq!(lat.num_edges(), 24);
        assert_eq!(lat.defect_boundary(0).len(), 4);
    }

    #[test]
    fn defect_boundary_is_perimeter() {
        for r in 1..5 {
            let lat = build_lattice(LatticeParams::double(r, 3, 3)).unwrap();
            assert_eq!(lat.defect_boundary(0).len(), 4 * r);
            assert_eq!(lat.defect_boundary(1).len(), 4 * r);
        }
    }

    #[test]
    fn neighbourhoods_are_consistent() {
        let lat = build_lattice(LatticeParams::double(2, 3, 2)).unwrap();
        for p in 0..lat.num_plaquettes() {
            for e in lat.plaquette_boundary(p) {
                assert!(lat.edge(e).plaquettes.contains(&Some(p)));
            }
        }
        for s in 0..lat.num_sites() {
            for e in lat.site_star(s) {
                assert!(lat.edge(e).sites.contains(&s));
            }
        }
    }
}
