//! Incremental-free but compact evaluator used inside the search loop.
//!
//! Instead of building the full planar subdivision, the zone boundary is
//! compressed to the chord endpoints: each ring contributes arcs between
//! consecutive endpoints, and faces are traced over arcs and chords only.
//! Per-ring prefix tables give each arc's shoelace sum and the parity of
//! rightward-ray crossings for every anchor and hole representative, so a
//! face walk costs O(chords) and membership is a bitmask test.

use std::cmp::Ordering;
use std::collections::HashMap;

use rustc_hash::FxHashMap;

use crate::geometry::{on_segment, orient, ray_crosses, segments_properly_cross, Point, Segment};
use crate::separation::{EfopModel, Objective};

use super::eval::Evaluation;

type Pos = (usize, usize);

pub(crate) struct FastEvaluator<'m> {
    model: &'m EfopModel,
    rings: Vec<&'m [Point]>,
    words: usize,
    n_anchors: usize,
    /// Per ring, `(len + 1) * words` xor-prefix crossing masks.
    prefix_mask: Vec<Vec<u64>>,
    /// Per ring, prefix sums of the shoelace cross terms.
    prefix_area: Vec<Vec<f64>>,
    /// Per candidate, `words` crossing masks.
    chord_mask: Vec<u64>,
    ends: Vec<[Pos; 2]>,
    segments: Vec<Segment>,
    bounds: Vec<[f64; 4]>,
    /// Lazily filled crossing bitsets, one row per candidate.
    cross_rows: Vec<Option<Box<[u64]>>>,
    /// Selections of up to seven ids, packed 16 bits apiece behind a length tag.
    packed: FxHashMap<u128, Evaluation>,
    cache: FxHashMap<Vec<u32>, Evaluation>,
    single: Vec<Option<Evaluation>>,
    scratch: Scratch,
}

#[derive(Clone, Copy)]
struct Entry {
    chord: usize,
    end: usize,
}

#[derive(Clone, Copy)]
struct Node {
    ring: usize,
    idx: usize,
    /// Range of this node's chord ends in `Scratch::entries`.
    first: usize,
    last: usize,
}

struct Cycle {
    area2: f64,
    /// Half-edge range in the walk log.
    walk: (usize, usize),
    /// First ring edge `(ring, idx)` on the cycle, else its first chord.
    rep_edge: Option<Pos>,
    rep_chord: Option<usize>,
}

/// Buffers reused between evaluations.
#[derive(Default)]
struct Scratch {
    prefix: Vec<usize>,
    ends: Vec<(Pos, usize, usize)>,
    nodes: Vec<Node>,
    entries: Vec<Entry>,
    node_of: Vec<[usize; 2]>,
    pos_of: Vec<[usize; 2]>,
    ring_range: Vec<(usize, usize)>,
    visited: Vec<bool>,
    walk_log: Vec<usize>,
    cycles: Vec<Cycle>,
    masks: Vec<u64>,
    /// Positive faces: traced cycle index (`None` for the untouched outer
    /// ring) and twice the area.
    positives: Vec<(Option<usize>, f64)>,
    negatives: Vec<usize>,
    untouched: Vec<usize>,
    counts: Vec<usize>,
    areas: Vec<f64>,
}

fn cross_f(a: Point, b: Point) -> f64 {
    a.xf() * b.yf() - a.yf() * b.xf()
}

impl<'m> FastEvaluator<'m> {
    pub(crate) fn new(model: &'m EfopModel) -> Self {
        let rings: Vec<&[Point]> = model.polygon.rings().map(|r| r.as_slice()).collect();
        let n_anchors = model.anchors.len();
        let mut reps: Vec<Point> = model.anchors.clone();
        for hole in &rings[1..] {
            reps.push(Point::midpoint(hole[0], hole[1 % hole.len()]));
        }
        let words = reps.len().div_ceil(64).max(1);
        let mut prefix_mask = Vec::with_capacity(rings.len());
        let mut prefix_area = Vec::with_capacity(rings.len());
        for ring in &rings {
            let n = ring.len();
            let mut pm = vec![0u64; (n + 1) * words];
            let mut pa = vec![0.0; n + 1];
            for i in 0..n {
                let (a, b) = (ring[i], ring[(i + 1) % n]);
                pa[i + 1] = pa[i] + cross_f(a, b);
                for w in 0..words {
                    pm[(i + 1) * words + w] = pm[i * words + w];
                }
                for (q, &p) in reps.iter().enumerate() {
                    if ray_crosses(p, a, b) {
                        pm[(i + 1) * words + q / 64] ^= 1 << (q % 64);
                    }
                }
            }
            prefix_mask.push(pm);
            prefix_area.push(pa);
        }
        let mut position: HashMap<Point, Pos> = HashMap::new();
        for (r, ring) in rings.iter().enumerate() {
            for (i, p) in ring.iter().enumerate() {
                position.entry(*p).or_insert((r, i));
            }
        }
        let k = model.candidates.len();
        let mut chord_mask = vec![0u64; k * words];
        let mut ends = Vec::with_capacity(k);
        let mut segments = Vec::with_capacity(k);
        let mut bounds = Vec::with_capacity(k);
        for (c, s) in model.candidates.iter().enumerate() {
            for (q, &p) in reps.iter().enumerate() {
                if ray_crosses(p, s.a, s.b) {
                    chord_mask[c * words + q / 64] ^= 1 << (q % 64);
                }
            }
            ends.push([position[&s.a], position[&s.b]]);
            segments.push(s.segment());
            let (ax, ay, bx, by) = (s.a.xf(), s.a.yf(), s.b.xf(), s.b.yf());
            bounds.push([ax.min(bx) - 1e-9, ay.min(by) - 1e-9, ax.max(bx) + 1e-9, ay.max(by) + 1e-9]);
        }
        FastEvaluator {
            model,
            rings,
            words,
            n_anchors,
            prefix_mask,
            prefix_area,
            chord_mask,
            ends,
            segments,
            bounds,
            cross_rows: vec![None; k],
            packed: FxHashMap::default(),
            cache: FxHashMap::default(),
            single: vec![None; k],
            scratch: Scratch::default(),
        }
    }

    fn cross_row(&mut self, a: usize) -> &[u64] {
        if self.cross_rows[a].is_none() {
            let k = self.segments.len();
            let mut row = vec![0u64; k.div_ceil(64)].into_boxed_slice();
            let ba = self.bounds[a];
            for b in 0..k {
                let bb = self.bounds[b];
                if bb[0] > ba[2] || ba[0] > bb[2] || bb[1] > ba[3] || ba[1] > bb[3] {
                    continue;
                }
                if segments_properly_cross(&self.segments[a], &self.segments[b]) {
                    row[b / 64] |= 1 << (b % 64);
                }
            }
            self.cross_rows[a] = Some(row);
        }
        self.cross_rows[a].as_deref().expect("row filled above")
    }

    pub(crate) fn crosses(&mut self, a: usize, b: usize) -> bool {
        self.cross_row(a)[b / 64] >> (b % 64) & 1 == 1
    }

    /// Number of ids in `others` whose chords cross chord `a`.
    pub(crate) fn cross_count(&mut self, a: usize, others: &[u32]) -> u32 {
        let row = self.cross_row(a);
        others.iter().filter(|&&b| row[b as usize / 64] >> (b % 64) & 1 == 1).count() as u32
    }

    /// Memoised evaluation of a selection given as sorted candidate ids.
    pub(crate) fn evaluate(&mut self, sorted: &[u32]) -> Evaluation {
        if sorted.len() == 1 {
            let i = sorted[0] as usize;
            if let Some(e) = self.single[i] {
                return e;
            }
            let e = self.compute(sorted);
            self.single[i] = Some(e);
            return e;
        }
        if sorted.len() <= 7 && self.segments.len() < 1 << 16 {
            let key = sorted.iter().fold(sorted.len() as u128, |acc, &i| acc << 16 | (i as u128 + 1));
            if let Some(e) = self.packed.get(&key) {
                return *e;
            }
            let e = self.compute(sorted);
            self.packed.insert(key, e);
            return e;
        }
        if let Some(e) = self.cache.get(sorted) {
            return *e;
        }
        let e = self.compute(sorted);
        self.cache.insert(sorted.to_vec(), e);
        e
    }

    fn compute(&mut self, sorted: &[u32]) -> Evaluation {
        let mut sc = std::mem::take(&mut self.scratch);
        let mut f_cross = 0;
        sc.prefix.clear();
        let mut prefix_open = true;
        for (i, &a) in sorted.iter().enumerate() {
            let crossed = self.cross_count(a as usize, &sorted[..i]);
            f_cross += crossed;
            if crossed > 0 {
                prefix_open = false;
            }
            if prefix_open {
                sc.prefix.push(a as usize);
            }
        }
        let with_areas = self.model.objective == Objective::LeastSquaresAreas;
        self.faces(&mut sc, with_areas);
        let max = sc.counts.iter().copied().max().unwrap_or(0);
        let empty = sc.counts.iter().filter(|&&c| c == 0).count();
        let objective = if with_areas {
            let mean = sc.areas.iter().sum::<f64>() / sc.areas.len() as f64;
            sc.areas.iter().map(|a| (mean - a) * (mean - a)).sum()
        } else {
            let mut l: Vec<f64> = sorted.iter().map(|&i| self.model.candidates[i as usize].length).collect();
            l.sort_by(f64::total_cmp);
            l.iter().sum()
        };
        self.scratch = sc;
        Evaluation { f_cross, f_clust: (max.saturating_sub(1) + empty) as u32, objective }
    }

    fn point(&self, p: Pos) -> Point {
        self.rings[p.0][p.1]
    }

    /// Anchor count per face into `sc.counts` and, if requested, face areas
    /// into `sc.areas`, for the chords in `sc.prefix`.
    fn faces(&self, sc: &mut Scratch, with_areas: bool) {
        let w = self.words;
        let chords = &sc.prefix;
        // Nodes: chord endpoints grouped by ring position.
        sc.ends.clear();
        for (t, &c) in chords.iter().enumerate() {
            sc.ends.push((self.ends[c][0], t, 0));
            sc.ends.push((self.ends[c][1], t, 1));
        }
        sc.ends.sort_unstable_by_key(|e| e.0);
        sc.nodes.clear();
        sc.entries.clear();
        sc.node_of.clear();
        sc.node_of.resize(chords.len(), [0; 2]);
        sc.pos_of.clear();
        sc.pos_of.resize(chords.len(), [0; 2]);
        for &(pos, t, end) in &sc.ends {
            if sc.nodes.last().is_none_or(|n| (n.ring, n.idx) != pos) {
                let at = sc.entries.len();
                sc.nodes.push(Node { ring: pos.0, idx: pos.1, first: at, last: at });
            }
            let ni = sc.nodes.len() - 1;
            sc.entries.push(Entry { chord: t, end });
            sc.nodes[ni].last += 1;
            sc.node_of[t][end] = ni;
        }
        for node in &sc.nodes {
            let ring = self.rings[node.ring];
            let o = ring[node.idx];
            let f = ring[(node.idx + 1) % ring.len()];
            let other = |e: &Entry| self.point(self.ends[chords[e.chord]][1 - e.end]);
            let group = &mut sc.entries[node.first..node.last];
            if group.len() > 1 {
                group.sort_by(|a, b| ccw_from(o, f, other(a), other(b)));
            }
            for (j, e) in group.iter().enumerate() {
                sc.pos_of[e.chord][e.end] = j;
            }
        }
        sc.ring_range.clear();
        sc.ring_range.resize(self.rings.len(), (0, 0));
        {
            let mut i = 0;
            while i < sc.nodes.len() {
                let r = sc.nodes[i].ring;
                let mut j = i;
                while j < sc.nodes.len() && sc.nodes[j].ring == r {
                    j += 1;
                }
                sc.ring_range[r] = (i, j);
                i = j;
            }
        }
        let (nodes, entries, ring_range) = (&sc.nodes, &sc.entries, &sc.ring_range);
        let (node_of, pos_of) = (&sc.node_of, &sc.pos_of);
        let next_node = |u: usize| {
            let (s, e) = ring_range[nodes[u].ring];
            if u + 1 < e {
                u + 1
            } else {
                s
            }
        };
        let n_nodes = nodes.len();
        // Half-edges: arcs are `0..n_nodes`, chord `t` leaving end `d` is
        // `n_nodes + 2t + d`.
        let next = |h: usize| -> usize {
            let (v, j) = if h < n_nodes {
                let v = next_node(h);
                (v, nodes[v].last - nodes[v].first)
            } else {
                let t = (h - n_nodes) / 2;
                let d = (h - n_nodes) % 2;
                (node_of[t][1 - d], pos_of[t][1 - d])
            };
            if j == 0 {
                v
            } else {
                let e = &entries[nodes[v].first + j - 1];
                n_nodes + 2 * e.chord + e.end
            }
        };

        let total = n_nodes + 2 * chords.len();
        sc.visited.clear();
        sc.visited.resize(total, false);
        sc.walk_log.clear();
        sc.cycles.clear();
        sc.masks.clear();
        for h0 in 0..total {
            if sc.visited[h0] {
                continue;
            }
            let base = sc.masks.len();
            sc.masks.resize(base + w, 0);
            let mask = &mut sc.masks[base..];
            let mut area2 = 0.0;
            let mut rep_edge = None;
            let mut rep_chord = None;
            let start = sc.walk_log.len();
            let mut h = h0;
            loop {
                sc.visited[h] = true;
                sc.walk_log.push(h);
                if h < n_nodes {
                    let (r, i) = (nodes[h].ring, nodes[h].idx);
                    let j = nodes[next_node(h)].idx;
                    let (pm, pa) = (&self.prefix_mask[r], &self.prefix_area[r]);
                    let len = self.rings[r].len();
                    for k in 0..w {
                        mask[k] ^= pm[j * w + k] ^ pm[i * w + k];
                        if j <= i {
                            mask[k] ^= pm[len * w + k];
                        }
                    }
                    area2 += pa[j] - pa[i] + if j <= i { pa[len] } else { 0.0 };
                    rep_edge.get_or_insert((r, i));
                } else {
                    let t = (h - n_nodes) / 2;
                    let d = (h - n_nodes) % 2;
                    let c = chords[t];
                    for (m, x) in mask[..w].iter_mut().zip(&self.chord_mask[c * w..(c + 1) * w]) {
                        *m ^= x;
                    }
                    let (a, b) = (self.point(self.ends[c][d]), self.point(self.ends[c][1 - d]));
                    area2 += cross_f(a, b);
                    rep_chord.get_or_insert(h);
                }
                h = next(h);
                if h == h0 {
                    break;
                }
            }
            sc.cycles.push(Cycle { area2, walk: (start, sc.walk_log.len()), rep_edge, rep_chord });
        }

        // Whole rings without chord endpoints.
        sc.untouched.clear();
        sc.untouched.extend((0..self.rings.len()).filter(|&r| ring_range[r].0 == ring_range[r].1));
        sc.positives.clear();
        sc.negatives.clear();
        for (ci, c) in sc.cycles.iter().enumerate() {
            if c.area2 > 0.0 {
                sc.positives.push((Some(ci), c.area2));
            } else {
                sc.negatives.push(ci);
            }
        }
        if sc.untouched.first() == Some(&0) {
            let len = self.rings[0].len();
            sc.positives.push((None, self.prefix_area[0][len]));
        }
        let outer_len = self.rings[0].len();
        let masks = &sc.masks;
        let positives = &sc.positives;
        let mask_of = |p: Option<usize>| -> &[u64] {
            match p {
                Some(ci) => &masks[ci * w..(ci + 1) * w],
                None => &self.prefix_mask[0][outer_len * w..(outer_len + 1) * w],
            }
        };
        let owner_of_bit = |q: usize| -> usize {
            positives
                .iter()
                .enumerate()
                .filter(|(_, p)| mask_of(p.0)[q / 64] >> (q % 64) & 1 == 1)
                .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
                .map(|(i, _)| i)
                .expect("every interior point lies in some face")
        };
        sc.counts.clear();
        sc.counts.resize(positives.len(), 0);
        for q in 0..self.n_anchors {
            sc.counts[owner_of_bit(q)] += 1;
        }
        sc.areas.clear();
        if !with_areas {
            return;
        }
        sc.areas.extend(positives.iter().map(|p| p.1));
        for &r in sc.untouched.iter().filter(|&&r| r > 0) {
            let len = self.rings[r].len();
            sc.areas[owner_of_bit(self.n_anchors + r - 1)] += self.prefix_area[r][len];
        }
        for &ni in &sc.negatives {
            let cyc = &sc.cycles[ni];
            let rep = match (cyc.rep_edge, cyc.rep_chord) {
                (Some((r, i)), _) => {
                    let ring = self.rings[r];
                    Point::midpoint(ring[i], ring[(i + 1) % ring.len()])
                }
                (None, Some(h)) => {
                    let t = (h - n_nodes) / 2;
                    let c = chords[t];
                    Point::midpoint(self.point(self.ends[c][0]), self.point(self.ends[c][1]))
                }
                (None, None) => unreachable!("cycles are non-empty"),
            };
            let owner = positives
                .iter()
                .enumerate()
                .filter(|(_, p)| self.contains(rep, p.0, &sc.cycles, &sc.walk_log, nodes, &next_node, chords))
                .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
                .map(|(i, _)| i)
                .expect("hole components lie in some face");
            sc.areas[owner] += cyc.area2;
        }
        for a in sc.areas.iter_mut() {
            *a /= 2.0;
        }
    }

    /// Exact strict containment of `p` in a positive cycle (`None` is the
    /// untouched outer ring).
    #[allow(clippy::too_many_arguments)]
    fn contains(
        &self,
        p: Point,
        cycle: Option<usize>,
        cycles: &[Cycle],
        walk_log: &[usize],
        nodes: &[Node],
        next_node: &dyn Fn(usize) -> usize,
        chords: &[usize],
    ) -> bool {
        let mut inside = false;
        let mut visit = |a: Point, b: Point| -> bool {
            if on_segment(p, a, b) {
                return false;
            }
            inside ^= ray_crosses(p, a, b);
            true
        };
        let ring_edges = |r: usize, from: usize, count: usize, visit: &mut dyn FnMut(Point, Point) -> bool| {
            let ring = self.rings[r];
            (0..count).all(|s| {
                let i = (from + s) % ring.len();
                visit(ring[i], ring[(i + 1) % ring.len()])
            })
        };
        match cycle {
            None => {
                if !ring_edges(0, 0, self.rings[0].len(), &mut visit) {
                    return false;
                }
            }
            Some(ci) => {
                let n_nodes = nodes.len();
                let (s, e) = cycles[ci].walk;
                for &h in &walk_log[s..e] {
                    let ok = if h < n_nodes {
                        let (r, i) = (nodes[h].ring, nodes[h].idx);
                        let j = nodes[next_node(h)].idx;
                        let len = self.rings[r].len();
                        let count = if j > i { j - i } else { j + len - i };
                        ring_edges(r, i, count, &mut visit)
                    } else {
                        let t = (h - n_nodes) / 2;
                        let d = (h - n_nodes) % 2;
                        let c = chords[t];
                        visit(self.point(self.ends[c][d]), self.point(self.ends[c][1 - d]))
                    };
                    if !ok {
                        return false;
                    }
                }
            }
        }
        inside
    }
}

/// Counterclockwise order of directions `o -> a`, `o -> b` measured from
/// the direction `o -> f`.
fn ccw_from(o: Point, f: Point, a: Point, b: Point) -> Ordering {
    let half = |p: Point| {
        let s = orient(o, f, p);
        if s > 0 {
            0
        } else if s == 0 && same_direction(o, f, p) {
            // Never produced by filtered chords; kept total.
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&orient(o, a, b)))
}

fn same_direction(o: Point, f: Point, p: Point) -> bool {
    let (fx, fy) = (f.x() - o.x(), f.y() - o.y());
    let (px, py) = (p.x() - o.x(), p.y() - o.y());
    fx * px + fy * py > 0.into()
}

#[cfg(test)]
mod tests {
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::map::{load_map, MapFormat};
    use crate::regions::{build_zone_models, AnalysisConfig};
    use crate::solver::eval::evaluate;

    fn models(text: &str, format: MapFormat, objective: Objective) -> Vec<EfopModel> {
        let map = load_map(text.as_bytes(), format).unwrap();
        let config = AnalysisConfig { objective, ..Default::default() };
        build_zone_models(&map, &config).into_iter().filter_map(|z| z.model.ok()).collect()
    }

    #[test]
    fn matches_reference_evaluation() {
        let corpus = [
            (include_str!("../../../../maps/island.txt"), MapFormat::Ascii),
            (include_str!("../../../../maps/two_base_valley.txt"), MapFormat::Ascii),
            (include_str!("../../../../maps/oxide.json"), MapFormat::Json),
            (include_str!("../../../../maps/central_chunk.txt"), MapFormat::Ascii),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        for (text, format) in corpus {
            for objective in [Objective::MinSeparationLength, Objective::LeastSquaresAreas] {
                for model in models(text, format, objective) {
                    let mut fast = FastEvaluator::new(&model);
                    let k = model.candidates.len();
                    for _ in 0..150 {
                        let size = rng.gen_range(1..=model.required_selected.min(k));
                        let mut sel: Vec<u32> = sample(&mut rng, k, size).into_iter().map(|i| i as u32).collect();
                        sel.sort_unstable();
                        let ids: Vec<usize> = sel.iter().map(|&i| i as usize).collect();
                        let (a, b) = (fast.evaluate(&sel), evaluate(&ids, &model));
                        assert_eq!((a.f_cross, a.f_clust), (b.f_cross, b.f_clust), "selection {ids:?}");
                        assert!((a.objective - b.objective).abs() <= 1e-9 * b.objective.abs().max(1.0));
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked >= 1000);
    }
}
