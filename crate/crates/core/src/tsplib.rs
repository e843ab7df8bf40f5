//! TSPLIB `EUC_2D` instances.

use std::fmt;
use std::path::Path;

use crate::geometry::Point;

/// An undirected edge `{u, v}` with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: i64,
}

impl Edge {
    pub fn new(a: usize, b: usize, w: i64) -> Self {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Self { u, v, w }
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    /// Sort key: weight, then endpoints lexicographically.
    pub fn key(&self) -> (i64, usize, usize) {
        (self.w, self.u, self.v)
    }
}

/// TSPLIB `nint` of the Euclidean distance.
pub fn euc2d_distance(a: Point, b: Point) -> i64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    ((dx * dx + dy * dy).sqrt() + 0.5).floor() as i64
}

/// A complete graph with Euclidean weights.
#[derive(Debug, Clone)]
pub struct TspInstance {
    pub name: String,
    coords: Vec<Point>,
    weights: Vec<i64>,
    edges_by_weight: Vec<Edge>,
}

impl TspInstance {
    pub fn from_coords(name: impl Into<String>, coords: Vec<Point>) -> Self {
        let n = coords.len();
        let mut weights = vec![0; n * n];
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let w = euc2d_distance(coords[i], coords[j]);
                weights[i * n + j] = w;
                weights[j * n + i] = w;
                edges.push(Edge { u: i, v: j, w });
            }
        }
        edges.sort_by_key(Edge::key);
        Self {
            name: name.into(),
            coords,
            weights,
            edges_by_weight: edges,
        }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> i64 {
        self.weights[i * self.coords.len() + j]
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> Point {
        self.coords[i]
    }

    /// All `n(n-1)/2` edges, non-decreasing in weight, ties by `(u, v)`.
    pub fn edges_by_weight(&self) -> &[Edge] {
        &self.edges_by_weight
    }

    pub fn edge(&self, i: usize, j: usize) -> Edge {
        Edge::new(i, j, self.weight(i, j))
    }

    /// Weight of the closed tour visiting `order` in sequence.
    pub fn tour_weight(&self, order: &[usize]) -> i64 {
        if order.is_empty() {
            return 0;
        }
        order
            .iter()
            .zip(order.iter().cycle().skip(1))
            .map(|(&a, &b)| self.weight(a, b))
            .sum()
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, ParseError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ParseError {
            line: 0,
            kind: ParseErrorKind::Io(format!("{}: {e}", path.display())),
        })?;
        parse_instance(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based line number; 0 when the problem is not tied to a line.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Io(String),
    MalformedHeader(String),
    UnsupportedWeightType(String),
    MissingDimension,
    MissingCoordSection,
    MalformedNode(String),
    NodeIdOutOfRange(usize),
    DuplicateNode(usize),
    MissingNode(usize),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        match self {
            Io(msg) => write!(f, "cannot read instance: {msg}"),
            MalformedHeader(l) => write!(f, "malformed header line `{l}`"),
            UnsupportedWeightType(t) => {
                write!(f, "unsupported EDGE_WEIGHT_TYPE `{t}` (only EUC_2D)")
            }
            MissingDimension => write!(f, "DIMENSION missing before NODE_COORD_SECTION"),
            MissingCoordSection => write!(f, "no NODE_COORD_SECTION"),
            MalformedNode(l) => write!(f, "malformed node line `{l}`"),
            NodeIdOutOfRange(id) => write!(f, "node id {id} outside 1..=DIMENSION"),
            DuplicateNode(id) => write!(f, "duplicate node id {id}"),
            MissingNode(id) => write!(f, "node {id} has no coordinates"),
        }
    }
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Parse a TSPLIB file with `EDGE_WEIGHT_TYPE: EUC_2D`.
pub fn parse_instance(text: &str) -> Result<TspInstance, ParseError> {
    let mut name = String::from("unnamed");
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut coords: Vec<Option<Point>> = Vec::new();
    let mut in_coords = false;
    let mut saw_coords = false;
    let mut coord_start_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if in_coords {
            let mut parts = line.split_whitespace();
            let first = parts.next().unwrap_or_default();
            if let Ok(id) = first.parse::<usize>() {
                let x = parts.next().and_then(|t| t.parse::<f64>().ok());
                let y = parts.next().and_then(|t| t.parse::<f64>().ok());
                let (Some(x), Some(y)) = (x, y) else {
                    return Err(err(lineno, ParseErrorKind::MalformedNode(line.into())));
                };
                if parts.next().is_some() || !x.is_finite() || !y.is_finite() {
                    return Err(err(lineno, ParseErrorKind::MalformedNode(line.into())));
                }
                if id == 0 || id > coords.len() {
                    return Err(err(lineno, ParseErrorKind::NodeIdOutOfRange(id)));
                }
                if coords[id - 1].is_some() {
                    return Err(err(lineno, ParseErrorKind::DuplicateNode(id)));
                }
                coords[id - 1] = Some(Point::new(x, y));
                continue;
            }
            // A keyword ends the section.
            in_coords = false;
        }

        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (line, ""),
        };
        match key {
            "NAME" => name = value.to_string(),
            "TYPE" | "COMMENT" | "DISPLAY_DATA_TYPE" | "NODE_COORD_TYPE" => {}
            "DIMENSION" => {
                let d = value
                    .parse::<usize>()
                    .map_err(|_| err(lineno, ParseErrorKind::MalformedHeader(line.into())))?;
                dimension = Some(d);
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EUC_2D" {
                    return Err(err(
                        lineno,
                        ParseErrorKind::UnsupportedWeightType(value.into()),
                    ));
                }
                weight_type = Some(value.to_string());
            }
            "NODE_COORD_SECTION" => {
                let d = dimension.ok_or_else(|| err(lineno, ParseErrorKind::MissingDimension))?;
                if weight_type.is_none() {
                    return Err(err(
                        lineno,
                        ParseErrorKind::UnsupportedWeightType("<missing>".into()),
                    ));
                }
                coords = vec![None; d];
                in_coords = true;
                saw_coords = true;
                coord_start_line = lineno;
            }
            _ if value.is_empty() && !line.contains(':') => {
                return Err(err(lineno, ParseErrorKind::MalformedHeader(line.into())));
            }
            other => log::debug!("ignoring TSPLIB key {other}"),
        }
    }

    if !saw_coords {
        return Err(err(0, ParseErrorKind::MissingCoordSection));
    }
    let points = coords
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| err(coord_start_line, ParseErrorKind::MissingNode(i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TspInstance::from_coords(name, points))
}
