//! Bulk-loaded bounding-box tree over segments.
//!
//! A variant of STR packing with binary splits. Segments are first ordered
//! by the larger side of their bounding box, longest first, and the root
//! split separates the long segments from the short ones: in a complete
//! Euclidean graph many edges span most of the plane and would otherwise
//! inflate every box they share. Below the root, each range is split at the
//! median of box centres along the longer axis of its bounding box.

use std::cmp::Ordering;

use super::{segments_cross, Rect, Segment};

pub const DEFAULT_LEAF_CAPACITY: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        bbox: Rect,
        start: usize,
        end: usize,
    },
    Inner {
        bbox: Rect,
        left: usize,
        right: usize,
    },
}

impl Node {
    fn bbox(&self) -> &Rect {
        match self {
            Node::Leaf { bbox, .. } | Node::Inner { bbox, .. } => bbox,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpatialIndex {
    items: Vec<Segment>,
    nodes: Vec<Node>,
    root: Option<usize>,
    leaf_capacity: usize,
}

fn size_key(s: &Segment) -> f64 {
    let b = s.bbox();
    b.width().max(b.height())
}

fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

impl SpatialIndex {
    pub fn build(segments: Vec<Segment>) -> Self {
        Self::with_leaf_capacity(segments, DEFAULT_LEAF_CAPACITY)
    }

    pub fn with_leaf_capacity(mut segments: Vec<Segment>, leaf_capacity: usize) -> Self {
        let leaf_capacity = leaf_capacity.max(1);
        segments.sort_by(|a, b| {
            cmp_f64(size_key(b), size_key(a))
                .then_with(|| cmp_f64(a.bbox().center().x, b.bbox().center().x))
                .then_with(|| cmp_f64(a.bbox().center().y, b.bbox().center().y))
                .then_with(|| a.id.cmp(&b.id))
        });
        let mut index = Self {
            items: segments,
            nodes: Vec::new(),
            root: None,
            leaf_capacity,
        };
        if !index.items.is_empty() {
            let len = index.items.len();
            index.root = Some(index.build_range(0, len, true));
        }
        index
    }

    fn bbox_of(&self, start: usize, end: usize) -> Rect {
        self.items[start..end]
            .iter()
            .map(Segment::bbox)
            .reduce(|a, b| a.union(&b))
            .expect("non-empty range")
    }

    fn build_range(&mut self, start: usize, end: usize, by_size: bool) -> usize {
        let bbox = self.bbox_of(start, end);
        if end - start <= self.leaf_capacity {
            self.nodes.push(Node::Leaf { bbox, start, end });
            return self.nodes.len() - 1;
        }
        if !by_size {
            let along_x = bbox.width() >= bbox.height();
            self.items[start..end].sort_by(|a, b| {
                let (ca, cb) = (a.bbox().center(), b.bbox().center());
                let ord = if along_x {
                    cmp_f64(ca.x, cb.x).then_with(|| cmp_f64(ca.y, cb.y))
                } else {
                    cmp_f64(ca.y, cb.y).then_with(|| cmp_f64(ca.x, cb.x))
                };
                ord.then_with(|| a.id.cmp(&b.id))
            });
        }
        let mid = start + (end - start) / 2;
        let left = self.build_range(start, mid, false);
        let right = self.build_range(mid, end, false);
        self.nodes.push(Node::Inner { bbox, left, right });
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn leaf_capacity(&self) -> usize {
        self.leaf_capacity
    }

    /// Segments whose bounding box meets `area`.
    pub fn query_bbox(&self, area: &Rect) -> Vec<&Segment> {
        let mut out = Vec::new();
        let Some(root) = self.root else { return out };
        let mut stack = vec![root];
        while let Some(k) = stack.pop() {
            let node = &self.nodes[k];
            if !node.bbox().intersects(area) {
                continue;
            }
            match *node {
                Node::Leaf { start, end, .. } => out.extend(
                    self.items[start..end]
                        .iter()
                        .filter(|s| s.bbox().intersects(area)),
                ),
                Node::Inner { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        out
    }

    /// Ids of all indexed segments that properly cross `e`, sorted.
    pub fn query_crossing(&self, e: &Segment) -> Vec<(usize, usize)> {
        let mut ids: Vec<(usize, usize)> = self
            .query_bbox(&e.bbox())
            .into_iter()
            .filter(|s| segments_cross(e, s))
            .map(|s| s.id)
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Leaves as `(bbox, segments)`, for structural checks.
    pub fn leaves(&self) -> Vec<(Rect, &[Segment])> {
        self.nodes
            .iter()
            .filter_map(|n| match *n {
                Node::Leaf { bbox, start, end } => Some((bbox, &self.items[start..end])),
                Node::Inner { .. } => None,
            })
            .collect()
    }

    /// Every inner node's box contains its children's boxes.
    pub fn boxes_nested(&self) -> bool {
        self.nodes.iter().all(|n| match *n {
            Node::Leaf { bbox, start, end } => self.items[start..end]
                .iter()
                .all(|s| bbox.contains(&s.bbox())),
            Node::Inner { bbox, left, right } => {
                bbox.contains(self.nodes[left].bbox()) && bbox.contains(self.nodes[right].bbox())
            }
        })
    }
}
