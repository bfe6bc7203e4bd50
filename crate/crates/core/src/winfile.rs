//! Line-oriented occupancy files.
//!
//! ```text
//! # comment
//! lattice D2Q4
//! extent 2          # window around a focal site, or `grid 4 4` for a whole field
//! 0 0 0             # offset (or site) coordinates, then a direction index
//! -1 0 2
//! ```
//!
//! Window offsets may be negative; grid coordinates are `0..extent` per axis.
//! [`to_string`] writes entries sorted, so parse/serialize round-trips.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::{LatticeDescriptor, OccupancyField};
use crate::simulator::Window;

/// Parsed contents of a `.win` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WinFile {
    Window(Window),
    Grid(OccupancyField),
}

impl WinFile {
    pub fn descriptor(&self) -> &LatticeDescriptor {
        match self {
            WinFile::Window(w) => w.descriptor(),
            WinFile::Grid(f) => f.descriptor(),
        }
    }
}

enum Shape {
    Extent(usize),
    Grid(Vec<usize>),
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse(text: &str) -> Result<WinFile> {
    let mut descriptor: Option<LatticeDescriptor> = None;
    let mut shape: Option<Shape> = None;
    let mut entries: Vec<(usize, Vec<i64>, usize)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().expect("nonempty line");
        match head {
            "lattice" => {
                if descriptor.is_some() {
                    return Err(perr(lineno, "duplicate `lattice` header"));
                }
                let name = words.next().ok_or_else(|| perr(lineno, "`lattice` needs a name"))?;
                if words.next().is_some() {
                    return Err(perr(lineno, "trailing tokens after lattice name"));
                }
                descriptor = Some(LatticeDescriptor::build(name).map_err(|e| perr(lineno, e.to_string()))?);
            }
            "extent" | "grid" => {
                if shape.is_some() {
                    return Err(perr(lineno, "duplicate `extent`/`grid` header"));
                }
                let nums = words
                    .map(|w| w.parse::<usize>().map_err(|_| perr(lineno, format!("bad size `{w}`"))))
                    .collect::<Result<Vec<_>>>()?;
                shape = Some(if head == "extent" {
                    match nums.as_slice() {
                        [n] => Shape::Extent(*n),
                        _ => return Err(perr(lineno, "`extent` takes exactly one value")),
                    }
                } else {
                    if nums.is_empty() || nums.contains(&0) {
                        return Err(perr(lineno, "`grid` needs positive sizes"));
                    }
                    Shape::Grid(nums)
                });
            }
            _ => {
                if descriptor.is_none() || shape.is_none() {
                    return Err(perr(
                        lineno,
                        "entries must follow the `lattice` and `extent`/`grid` headers",
                    ));
                }
                let nums = line
                    .split_whitespace()
                    .map(|w| w.parse::<i64>().map_err(|_| perr(lineno, format!("bad integer `{w}`"))))
                    .collect::<Result<Vec<_>>>()?;
                let (dir, coords) = nums.split_last().expect("nonempty line");
                if *dir < 0 {
                    return Err(perr(lineno, "negative direction index"));
                }
                entries.push((lineno, coords.to_vec(), *dir as usize));
            }
        }
    }

    let descriptor = descriptor.ok_or_else(|| perr(0, "missing `lattice` header"))?;
    let shape = shape.ok_or_else(|| perr(0, "missing `extent` or `grid` header"))?;
    let dim = descriptor.dimension();
    let m = descriptor.num_directions();
    let mut seen = BTreeSet::new();
    for (lineno, coords, dir) in &entries {
        if coords.len() != dim {
            return Err(perr(*lineno, format!("expected {dim} coordinates and a direction")));
        }
        if *dir >= m {
            return Err(perr(*lineno, format!("direction {dir} out of range for {descriptor}")));
        }
        if !seen.insert((coords.clone(), *dir)) {
            return Err(perr(*lineno, "duplicate entry"));
        }
    }

    match shape {
        Shape::Extent(extent) => {
            let mut w = Window::new(&descriptor, extent);
            for (lineno, coords, dir) in entries {
                let offset = coords
                    .iter()
                    .map(|&c| i32::try_from(c).map_err(|_| perr(lineno, "coordinate out of range")))
                    .collect::<Result<Vec<_>>>()?;
                w.set(&offset, dir, true).map_err(|e| perr(lineno, e.to_string()))?;
            }
            Ok(WinFile::Window(w))
        }
        Shape::Grid(extents) => {
            if extents.len() != dim {
                return Err(perr(0, format!("`grid` needs {dim} sizes for {descriptor}")));
            }
            let mut f = OccupancyField::empty(&descriptor, &extents)?;
            for (lineno, coords, dir) in entries {
                if coords.iter().zip(&extents).any(|(&c, &e)| c < 0 || c as usize >= e) {
                    return Err(perr(lineno, format!("site {coords:?} outside grid {extents:?}")));
                }
                let site = f.site_index(&coords);
                f.set(site, dir, true);
            }
            Ok(WinFile::Grid(f))
        }
    }
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Canonical text form.
pub fn to_string(file: &WinFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "lattice {}", file.descriptor().name());
    match file {
        WinFile::Window(w) => {
            let _ = writeln!(out, "extent {}", w.extent());
            for (offset, j) in w.occupied() {
                let _ = writeln!(out, "{} {j}", join(offset));
            }
        }
        WinFile::Grid(f) => {
            let _ = writeln!(out, "grid {}", join(f.extents()));
            let m = f.descriptor().num_directions();
            let mut lines: Vec<(Vec<usize>, usize)> = Vec::new();
            for site in 0..f.num_sites() {
                for j in (0..m).filter(|&j| f.get(site, j)) {
                    lines.push((f.site_coords(site), j));
                }
            }
            lines.sort();
            for (coords, j) in lines {
                let _ = writeln!(out, "{} {j}", join(coords));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Pattern;

    #[test]
    fn window_round_trip() {
        let text = "# focal pair\nlattice d2q4\nextent 1\n0 0 2\n0 0 0   # east\n-1 0 3\n";
        let parsed = parse(text).unwrap();
        let canon = to_string(&parsed);
        assert_eq!(canon, "lattice D2Q4\nextent 1\n-1 0 3\n0 0 0\n0 0 2\n");
        assert_eq!(parse(&canon).unwrap(), parsed);
        let WinFile::Window(w) = parsed else {
            panic!("expected window")
        };
        assert_eq!(w.pattern(&[0, 0]), "1010".parse::<Pattern>().unwrap());
    }

    #[test]
    fn grid_round_trip() {
        let text = "lattice D1Q2\ngrid 4\n1 0\n1 1\n2 0\n3 0\n0 0\n";
        let parsed = parse(text).unwrap();
        let WinFile::Grid(f) = &parsed else {
            panic!("expected grid")
        };
        let pats: Vec<String> = (0..4).map(|s| f.pattern(s).to_string()).collect();
        assert_eq!(pats, ["10", "11", "10", "10"]);
        assert_eq!(parse(&to_string(&parsed)).unwrap(), parsed);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = [
            ("lattice d2q4\nextent 1\n0 0 7\n", 3),
            ("lattice d2q4\nextent 1\n1 1 0\n", 3),
            ("lattice d2q4\nextent 1\n0 0 0\n0 0 0\n", 4),
            ("lattice d2q4\nextent x\n", 2),
            ("0 0 0\n", 1),
            ("lattice d9q9\n", 1),
            ("lattice d1q2\ngrid 4\n4 0\n", 3),
            ("lattice d1q2\nextent 1 2\n", 2),
        ];
        for (text, line) in bad {
            match parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(parse("lattice d2q4\n"), Err(Error::Parse { line: 0, .. })));
        assert!(matches!(
            parse("lattice d2q4\ngrid 3\n"),
            Err(Error::Parse { line: 0, .. })
        ));
    }
}
