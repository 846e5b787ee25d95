//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use pgcover::blocking::{canonical_key, gf2_minimal_sets, is_blocking, minimality_report, projective_triangle, span_dimension, PointSet};
use pgcover::covers::{cover_from_blocking, ie_union, union_size_by_inclusion_exclusion, union_size_direct, verify_cover, SizeProfile};
use pgcover::gflin::PrimeModulus;
use pgcover::projgeom::SpaceDescriptor;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn gf(p: u32) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

fn data(name: &str) -> String {
    format!("{DATA}/{name}")
}

fn cli(args: &[&str]) -> (i32, Value, String) {
    let mut full = vec!["pgcover", "--no-timing"];
    full.extend_from_slice(args);
    let (code, out, err) = pgcover_cli::run_from(full);
    let v = serde_json::from_str(&out).unwrap_or(Value::Null);
    (code, v, if err.is_empty() { out } else { err })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.2?}, limit {limit:?}", t))
}

fn golden_examples() -> Check {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (file, m, size) in [("b7.pts", 3, 7), ("b8.pts", 3, 8), ("b9.pts", 4, 9)] {
        let (code, v, _) = cli(&["verify", &data(file)]);
        let r = &v["result"];
        let cover_ok = ["covers", "irredundant", "maximal", "core_free"].iter().all(|k| r["cover"][k] == true);
        let ok = code == 0 && r["is_minimal"] == true && r["span_dimension"] == m && r["m"] == m && r["size"] == size && cover_ok;
        if !ok {
            failures.push(format!(
                "{file}: exit {code}, blocking {}, minimal {}, span {}, missed hyperplane {}",
                r["is_blocking"], r["is_minimal"], r["span_dimension"], r["uncovered_hyperplane"]
            ));
        }
    }
    let (fixed_code, fixed, _) = cli(&["verify", &data("b9_fixed.pts")]);
    let note = format!(
        "b9_fixed.pts (last point 1,2,0,1,1): exit {fixed_code}, minimal {}, span {}",
        fixed["result"]["is_minimal"], fixed["result"]["span_dimension"]
    );
    within(start, Duration::from_secs(1))?;
    if failures.is_empty() {
        Ok(format!("B7, B8, B9 minimal and spanning; {note}"))
    } else {
        Err(format!("{}; {note}", failures.join("; ")))
    }
}

fn listed_covers() -> Check {
    let start = Instant::now();
    for file in ["c7_c3_4.cover", "c8_c3_4.cover", "c9_c5_3.cover", "c9_c3_5.cover"] {
        let (code, v, msg) = cli(&["cover", &data(file)]);
        let r = &v["result"];
        let flags = ["covers", "irredundant", "maximal", "core_free"].iter().all(|k| r["report"][k] == true);
        let audit = r["audit"]["checks"].as_array().is_some_and(|cs| !cs.is_empty() && cs.iter().all(|c| c["passed"] == true));
        ensure(code == 0 && flags && audit, || format!("{file}: exit {code}, flags {flags}, audit {audit} {msg}"))?;
    }
    within(start, Duration::from_secs(5))?;
    Ok("C_7, C_8 of (C_3)^4, C_9 of (C_5)^3, C_9 of (C_3)^5 verified and audited".into())
}

/// PG(m,2) with points and hyperplanes as bit vectors; `inc[x]` holds the hyperplanes through `x`.
struct Gf2Space {
    vecs: Vec<u32>,
    inc: Vec<u64>,
    all: u64,
}

impl Gf2Space {
    fn new(m: usize) -> Self {
        let vecs: Vec<u32> = (1..1u32 << (m + 1)).collect();
        let inc = vecs
            .iter()
            .map(|&x| vecs.iter().enumerate().filter(|(_, &h)| (x & h).count_ones() % 2 == 0).fold(0u64, |a, (j, _)| a | 1 << j))
            .collect();
        let all = if vecs.len() == 64 { u64::MAX } else { (1u64 << vecs.len()) - 1 };
        Gf2Space { vecs, inc, all }
    }

    fn rank(&self, set: &[usize]) -> usize {
        let mut basis: Vec<u32> = Vec::new();
        for &i in set {
            let mut v = self.vecs[i];
            for &b in &basis {
                v = v.min(v ^ b);
            }
            if v != 0 {
                basis.push(v);
            }
        }
        basis.len()
    }
}

/// Every minimal blocking set of size at most `cap`, each produced once.
///
/// A node branches on the first hyperplane the set misses: one child per
/// point `x` of it, taking `x` and excluding the points of that hyperplane
/// before `x`. A branch ends once the set blocks (supersets are not
/// minimal), once some point has no tangent hyperplane left, or once a
/// missed hyperplane has all its points excluded.
fn naive_minimal_sets(s: &Gf2Space, cap: usize) -> Vec<Vec<usize>> {
    struct Walk<'a> {
        s: &'a Gf2Space,
        cap: usize,
        /// `on[h]`: points of hyperplane `h`.
        on: Vec<u64>,
        out: Vec<Vec<usize>>,
    }
    impl Walk<'_> {
        fn go(&mut self, set: &mut Vec<usize>, once: u64, twice: u64, excluded: u64) {
            let missed = self.s.all & !once;
            if missed == 0 {
                let mut sorted = set.clone();
                sorted.sort_unstable();
                self.out.push(sorted);
                return;
            }
            if set.len() == self.cap {
                return;
            }
            let mut rest = missed;
            while rest != 0 {
                let h = rest.trailing_zeros() as usize;
                if self.on[h] & !excluded == 0 {
                    return;
                }
                rest &= rest - 1;
            }
            let h = missed.trailing_zeros() as usize;
            let mut ex = excluded;
            let mut cand = self.on[h] & !excluded;
            while cand != 0 {
                let y = cand.trailing_zeros() as usize;
                cand &= cand - 1;
                let inc = self.s.inc[y];
                let twice2 = twice | (once & inc);
                set.push(y);
                if set.iter().all(|&x| self.s.inc[x] & !twice2 != 0) {
                    self.go(set, once | inc, twice2, ex | 1 << y);
                }
                set.pop();
                ex |= 1 << y;
            }
        }
    }
    let n = s.vecs.len();
    let on = (0..n).map(|h| (0..n).filter(|&x| s.inc[x] >> h & 1 == 1).fold(0u64, |a, x| a | 1 << x)).collect();
    let mut w = Walk { s, cap, on, out: Vec::new() };
    w.go(&mut Vec::new(), 0, 0, 0);
    w.out
}

fn gf2_classification() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    for m in 1..=5usize {
        let s = Gf2Space::new(m);
        let cap = if m <= 4 { usize::MAX } else { 8 };
        let found = naive_minimal_sets(&s, cap);
        let mut by_dim: BTreeMap<usize, Vec<&Vec<usize>>> = BTreeMap::new();
        for set in &found {
            by_dim.entry(s.rank(set) - 1).or_default().push(set);
        }
        for d in 1..=m {
            let closed = gf2_minimal_sets(m, d).map_err(|e| e.to_string())?;
            let sets = by_dim.get(&d).map(Vec::as_slice).unwrap_or(&[]);
            ensure(closed.exists == !sets.is_empty(), || format!("m={m} d={d}: closed form exists={}, enumeration found {}", closed.exists, sets.len()))?;
            ensure(closed.exists == (d % 2 == 1), || format!("m={m} d={d}: existence should follow parity"))?;
            ensure(sets.iter().all(|x| Some(x.len()) == closed.size), || format!("m={m} d={d}: sizes differ from {:?}", closed.size))?;
            ensure(closed.count_in_space.is_none_or(|c| c == sets.len() as u128), || {
                format!("m={m} d={d}: closed count {:?}, enumerated {}", closed.count_in_space, sets.len())
            })?;
            if d == m && closed.exists {
                ensure(closed.size == Some(m + 2), || format!("m={m}: size {:?}", closed.size))?;
                let space = SpaceDescriptor::new(m, gf(2)).unwrap();
                // x_0..x_m independent with x_{m+1} their sum: the map x_i -> e_i
                // carries the set onto the standard frame
                let to_standard = |x: &[usize]| s.rank(&x[..=m]) == m + 1 && x.iter().fold(0, |a, &i| a ^ s.vecs[i]) == 0;
                ensure(sets.iter().all(|x| to_standard(x)), || format!("m={m}: a spanning set is not a frame"))?;
                let keys: BTreeSet<_> = sets
                    .iter()
                    .step_by((sets.len() / 64).max(1))
                    .map(|x| {
                        let idx: Vec<u64> = x.iter().map(|&i| space.index_of(&coords(s.vecs[i], m))).collect();
                        canonical_key(&PointSet::from_indices(space, &idx).unwrap().blocking_matrix()).unwrap()
                    })
                    .collect();
                ensure(keys.len() == 1, || format!("m={m}: {} canonical keys in a sample", keys.len()))?;
                ensure(closed.spanning_count == Some(sets.len() as u128), || format!("m={m}: spanning count {:?} vs {}", closed.spanning_count, sets.len()))?;
                let rep = closed.representative.as_ref().ok_or("missing representative")?;
                ensure(keys.contains(&canonical_key(&rep.blocking_matrix()).unwrap()), || format!("m={m}: representative outside the class"))?;
            }
        }
        notes.push(format!("m={m}: {} sets", found.len()));
    }
    within(start, Duration::from_secs(120))?;
    Ok(notes.join(", "))
}

/// Coordinates of the bit vector `v` (bit `i` is coordinate `m - i`), leftmost nonzero already 1.
fn coords(v: u32, m: usize) -> Vec<u32> {
    (0..=m).map(|i| v >> (m - i) & 1).collect()
}

const NONEXISTENCE: [(usize, u32, usize); 3] = [(4, 3, 8), (5, 3, 9), (3, 3, 9)];

fn search_report(m: usize, p: u32, n: usize, threads: usize) -> (i32, String) {
    let (m, p, n, t) = (m.to_string(), p.to_string(), n.to_string(), threads.to_string());
    let (code, out, err) = pgcover_cli::run_from(["pgcover", "--no-timing", "--threads", &t, "search", "-m", &m, "-p", &p, "-n", &n]);
    (code, out + &err)
}

fn table_report(threads: usize) -> (i32, String) {
    let t = threads.to_string();
    let (code, out, err) = pgcover_cli::run_from(["pgcover", "--no-timing", "--threads", &t, "table", "--max-n", "9"]);
    (code, out + &err)
}

fn nonexistence() -> Check {
    let mut notes = Vec::new();
    for (m, p, n) in NONEXISTENCE {
        let start = Instant::now();
        let (code, out) = search_report(m, p, n, 4);
        let v: Value = serde_json::from_str(&out).map_err(|_| out.clone())?;
        let r = &v["result"];
        ensure(code == 3 && r["status"] == "exhausted_none", || format!("({m},{p},{n}): exit {code}, status {}", r["status"]))?;
        ensure(r["settled_by"].is_null(), || format!("({m},{p},{n}) settled by {} rather than search", r["settled_by"]))?;
        within(start, Duration::from_secs(300))?;
        notes.push(format!("({m},{p},{n}) none after {} nodes", r["nodes_explored"]));
    }
    Ok(notes.join(", "))
}

fn table_reproduction() -> Check {
    let start = Instant::now();
    let expected: BTreeMap<u64, BTreeSet<(u64, u64)>> = [
        (3, vec![(1, 2)]),
        (4, vec![(1, 3)]),
        (5, vec![(3, 2)]),
        (6, vec![(1, 5), (2, 3)]),
        (7, vec![(5, 2), (3, 3)]),
        (8, vec![(1, 7), (3, 3)]),
        (9, vec![(7, 2), (2, 5), (4, 3)]),
    ]
    .into_iter()
    .map(|(n, ps)| (n, ps.into_iter().collect()))
    .collect();
    let (code, out) = table_report(4);
    let v: Value = serde_json::from_str(&out).map_err(|_| out.clone())?;
    ensure(code == 0, || format!("exit {code}"))?;
    let mut got = BTreeMap::new();
    for row in v["result"]["rows"].as_array().ok_or("no rows")? {
        let n = row["n"].as_u64().unwrap();
        let pairs: BTreeSet<(u64, u64)> = row["pairs"].as_array().unwrap().iter().map(|p| (p[0].as_u64().unwrap(), p[1].as_u64().unwrap())).collect();
        for c in row["cells"].as_array().unwrap() {
            ensure(c["status"] != "budget_exceeded", || format!("n={n}: cell ({},{}) ran out of budget", c["m"], c["p"]))?;
            ensure(c["gf2_agrees"] != false, || format!("n={n}: cell ({},{}) disagrees with the GF(2) classification", c["m"], c["p"]))?;
            if n == 9 && c["m"] == 4 && c["p"] == 5 {
                ensure(c["method"] == "search" && c["status"] == "exhausted_none", || "(4,5,9) not settled by exhaustive search".into())?;
            }
        }
        got.insert(n, pairs);
    }
    ensure(got == expected, || format!("table {got:?}"))?;
    // no planar example at (m=3,p=5,n=9) either
    let (c3, _) = search_report(3, 5, 9, 4);
    ensure(c3 == 3, || format!("(3,5,9): exit {c3}"))?;
    within(start, Duration::from_secs(1800))?;
    Ok("rows n=3..9 match".into())
}

fn ie_certificates() -> Check {
    let start = Instant::now();
    let cases: [(u32, &[u64], i128, i128); 4] = [
        (3, &[81, 27, 9, 3, 1, 1, 1], 225, 243),
        (3, &[243, 81, 27, 9, 3, 1, 1, 1], 705, 729),
        (5, &[625, 125, 25, 5, 1, 1, 1, 1, 1], 2665, 3125),
        (3, &[729, 243, 81, 27, 9, 3, 1, 1, 1], 2125, 2187),
    ];
    for (p, levels, want, order) in cases {
        let profile = SizeProfile::new(gf(p), levels.to_vec()).map_err(|e| e.to_string())?;
        let got = ie_union(levels.len(), &profile).map_err(|e| e.to_string())?;
        ensure(got == want && got != order, || format!("{levels:?}: union {got}, expected {want}, group order {order}"))?;
    }
    within(start, Duration::from_secs(1))?;
    Ok("225, 705, 2665, 2125 against 243, 729, 3125, 2187".into())
}

/// Points in random order until the set blocks, then usually pruned to a minimal subset.
fn random_blocking(space: SpaceDescriptor, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let order: Vec<u64> = sample(rng, space.point_count() as usize, space.point_count() as usize).into_iter().map(|i| i as u64).collect();
    let blocks = |idx: &[u64]| is_blocking(&PointSet::from_indices(space, idx).unwrap());
    let mut idx = Vec::new();
    for &x in &order {
        idx.push(x);
        if idx.len() >= 2 && blocks(&idx) {
            break;
        }
    }
    if rng.gen_bool(0.7) {
        let mut i = 0;
        while i < idx.len() {
            let mut rest = idx.clone();
            rest.remove(i);
            if rest.len() >= 2 && blocks(&rest) {
                idx = rest;
            } else {
                i += 1;
            }
        }
    }
    idx
}

fn duality_suite() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut stats = Vec::new();
    for (m, p) in [(2usize, 3u32), (3, 3), (2, 5)] {
        let space = SpaceDescriptor::new(m, gf(p)).unwrap();
        let total = space.point_count() as usize;
        let (mut blocking, mut minimal) = (0, 0);
        for trial in 0..500 {
            let mut idx = if trial % 2 == 0 {
                let size = rng.gen_range(2..=total.min(12));
                sample(&mut rng, total, size).into_iter().map(|i| i as u64).collect()
            } else {
                random_blocking(space, &mut rng)
            };
            idx.sort_unstable();
            let size = idx.len();
            let b = PointSet::from_indices(space, &idx).unwrap();
            let r = minimality_report(&b);
            let c = cover_from_blocking(&b).map_err(|e| e.to_string())?;
            let cr = verify_cover(&c);
            let tangents = r.tangent_witnesses.iter().all(Option::is_some);
            let spanning = span_dimension(&b) == m;
            ensure(r.is_blocking == cr.covers && tangents == cr.irredundant && r.is_minimal == (cr.covers && cr.irredundant) && spanning == cr.core_free, || {
                format!("PG({m},{p}) trial {trial}: {idx:?}")
            })?;
            if size <= 9 {
                let direct = union_size_direct(&c).map_err(|e| e.to_string())? as i128;
                let ie = union_size_by_inclusion_exclusion(&c).map_err(|e| e.to_string())?;
                ensure(direct == ie, || format!("PG({m},{p}) trial {trial}: union {direct} vs {ie}"))?;
            }
            blocking += r.is_blocking as usize;
            minimal += r.is_minimal as usize;
        }
        stats.push(format!("PG({m},{p}) {blocking} blocking, {minimal} minimal"));
    }
    within(start, Duration::from_secs(120))?;
    Ok(stats.join(", "))
}

fn triangle_family() -> Check {
    let start = Instant::now();
    for p in [3u32, 5, 7, 11, 13] {
        let t = projective_triangle(gf(p)).map_err(|e| e.to_string())?;
        ensure(t.len() == 3 * (p as usize + 1) / 2 && minimality_report(&t).is_minimal, || format!("p={p}: size {}", t.len()))?;
    }
    // every subset of PG(2,3)
    let space = SpaceDescriptor::new(2, gf(3)).unwrap();
    let pts = space.point_count() as usize;
    let mut sizes = BTreeSet::new();
    let mut seen = HashSet::new();
    for mask in 1u32..1 << pts {
        let idx: Vec<u64> = (0..pts as u64).filter(|i| mask >> i & 1 == 1).collect();
        let b = PointSet::from_indices(space, &idx).unwrap();
        if minimality_report(&b).is_minimal {
            sizes.insert(idx.len());
            seen.insert(mask);
        }
    }
    let bound = (3.0 * 3f64.sqrt() + 1.0).floor() as usize;
    ensure(sizes.iter().all(|&s| s <= bound), || format!("sizes {sizes:?} exceed {bound}"))?;
    ensure(sizes == BTreeSet::from([4, 6]), || format!("sizes {sizes:?}"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("triangles minimal; PG(2,3) has {} minimal blocking sets, sizes {sizes:?}", seen.len()))
}

fn determinism() -> Check {
    for (m, p, n) in NONEXISTENCE {
        ensure(search_report(m, p, n, 1) == search_report(m, p, n, 4), || format!("({m},{p},{n}) differs between 1 and 4 threads"))?;
    }
    ensure(table_report(1) == table_report(4), || "table differs between 1 and 4 threads".into())?;
    Ok("search and table reports identical for 1 and 4 threads".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("golden examples", golden_examples),
        ("listed covers", listed_covers),
        ("GF(2) classification", gf2_classification),
        ("nonexistence by exhaustion", nonexistence),
        ("table reproduction", table_reproduction),
        ("inclusion-exclusion certificates", ie_certificates),
        ("duality suite", duality_suite),
        ("triangle family", triangle_family),
        ("determinism", determinism),
    ];
    // optional criterion numbers select a subset
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let result = f();
        let t = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {} {name} ({t:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({t:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
