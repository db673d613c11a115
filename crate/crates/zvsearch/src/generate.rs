//! Deterministic generators for the graph families used throughout the crate.
//!
//! Plain families label vertices `0..n`. Grids use `v{a*m+b}` for row `a`,
//! column `b`. The forbidden-family generators build bipaths from a list of
//! primary-path length pairs, one pair per gap between consecutive primary
//! vertices.

use crate::error::{input, Result};
use crate::graph::Graph;

type Edges = Vec<(String, String)>;

fn build(vertices: Vec<String>, edges: Edges) -> Result<Graph> {
    Graph::new(vertices, edges.iter().map(|(a, b)| (a.as_str(), b.as_str())))
}

fn num(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

pub fn path(n: usize) -> Result<Graph> {
    if n < 1 {
        return input("path needs at least one vertex");
    }
    let edges = (1..n).map(|i| ((i - 1).to_string(), i.to_string())).collect();
    build(num(n), edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return input("cycle needs at least three vertices");
    }
    let edges = (0..n).map(|i| (i.to_string(), ((i + 1) % n).to_string())).collect();
    build(num(n), edges)
}

pub fn complete(n: usize) -> Result<Graph> {
    if n < 1 {
        return input("complete graph needs at least one vertex");
    }
    let mut edges = vec![];
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i.to_string(), j.to_string()));
        }
    }
    build(num(n), edges)
}

/// `K_{p,q}` with sides `a0..` and `b0..`.
pub fn complete_bipartite(p: usize, q: usize) -> Result<Graph> {
    if p < 1 || q < 1 {
        return input("complete bipartite graph needs nonempty sides");
    }
    let mut edges = vec![];
    for i in 0..p {
        for j in 0..q {
            edges.push((format!("a{i}"), format!("b{j}")));
        }
    }
    build(vec![], edges)
}

/// The `n × m` grid; vertex `(a, b)` is labelled `v{a*m+b}`.
pub fn grid(n: usize, m: usize) -> Result<Graph> {
    if n < 2 || m < 2 {
        return input("grid sides must be at least 2");
    }
    let name = |a: usize, b: usize| format!("v{}", a * m + b);
    let mut edges = vec![];
    for a in 0..n {
        for b in 0..m {
            if b + 1 < m {
                edges.push((name(a, b), name(a, b + 1)));
            }
            if a + 1 < n {
                edges.push((name(a, b), name(a + 1, b)));
            }
        }
    }
    build(vec![], edges)
}

/// Perfect binary tree of the given depth in heap numbering (root `0`).
pub fn perfect_binary_tree(depth: usize) -> Result<Graph> {
    if depth > 20 {
        return input("tree depth above 20 is not supported");
    }
    let n = (1usize << (depth + 1)) - 1;
    let edges = (1..n).map(|i| (((i - 1) / 2).to_string(), i.to_string())).collect();
    build(num(n), edges)
}

/// Star with legs of the given lengths around centre `c`; leg `i` has
/// vertices `l{i}_1, l{i}_2, ...` outward.
pub fn spider(legs: &[usize]) -> Result<Graph> {
    if legs.contains(&0) {
        return input("spider legs must have positive length");
    }
    let mut edges = vec![];
    for (i, &len) in legs.iter().enumerate() {
        let mut prev = "c".to_string();
        for j in 1..=len {
            let cur = format!("l{i}_{j}");
            edges.push((prev, cur.clone()));
            prev = cur;
        }
    }
    build(vec!["c".into()], edges)
}

/// The 8-vertex subdivision of `K_4` with branch vertices `A`–`D` and the
/// edge `A`–`D` replaced by the path through `I1..I4`.
pub fn subdivided_k4() -> Graph {
    let e = [
        ("A", "B"), ("B", "C"), ("C", "D"), ("D", "I4"), ("I4", "I3"),
        ("I3", "I2"), ("I2", "I1"), ("I1", "A"), ("A", "C"), ("B", "D"),
    ];
    Graph::from_edges(&e).expect("fixed edge list")
}

/// `K_4` with every edge subdivided `s` times.
pub fn f1(s: usize) -> Graph {
    let k4 = complete(4).expect("n = 4");
    crate::graph::subdivide_uniform(&k4, s).derived
}

/// Length pairs for one bipath; `pairs.len() + 1` is its order.
pub type Bipath = Vec<(usize, usize)>;

/// Default bipath: order 3, every primary path of length 2.
pub fn default_bipath() -> Bipath {
    vec![(2, 2), (2, 2)]
}

fn check_bipath(b: &Bipath) -> Result<()> {
    if b.len() < 2 {
        return input("a bipath needs order at least 3");
    }
    for &(x, y) in b {
        if x == 0 || y == 0 || (x == 1 && y == 1) {
            return input(format!("primary path lengths ({x},{y}) do not give a simple graph"));
        }
    }
    Ok(())
}

// Appends a bipath from `from` to `to`, naming interior vertices `{tag}...`.
fn push_bipath(edges: &mut Edges, tag: &str, from: &str, to: &str, b: &Bipath) {
    let k = b.len();
    let primary = |j: usize| match j {
        0 => from.to_string(),
        j if j == k => to.to_string(),
        j => format!("{tag}p{j}"),
    };
    for (j, &(x, y)) in b.iter().enumerate() {
        for (side, len) in [("u", x), ("w", y)] {
            let mut prev = primary(j);
            for t in 1..len {
                let cur = format!("{tag}p{j}{side}{t}");
                edges.push((prev, cur.clone()));
                prev = cur;
            }
            edges.push((prev, primary(j + 1)));
        }
    }
}

fn push_path(edges: &mut Edges, tag: &str, from: &str, to: &str, len: usize) {
    let mut prev = from.to_string();
    for t in 1..len {
        let cur = format!("{tag}{t}");
        edges.push((prev, cur.clone()));
        prev = cur;
    }
    edges.push((prev, to.to_string()));
}

/// Three bipaths between `a` and `b`, otherwise disjoint.
pub fn f2(bipaths: &[Bipath; 3]) -> Result<Graph> {
    let mut edges = vec![];
    for (i, b) in bipaths.iter().enumerate() {
        check_bipath(b)?;
        push_bipath(&mut edges, &format!("x{i}"), "a", "b", b);
    }
    build(vec![], edges)
}

/// Bipaths `x0`, `x1` between `v1`, `v2` and `x2`, `x3` between `v3`, `v4`,
/// joined by disjoint paths `v1`–`v3` and `v2`–`v4` of the given lengths.
pub fn f3(bipaths: &[Bipath; 4], p1: usize, p2: usize) -> Result<Graph> {
    if p1 == 0 || p2 == 0 {
        return input("connector paths need positive length");
    }
    let mut edges = vec![];
    for (i, b) in bipaths.iter().enumerate() {
        check_bipath(b)?;
        let (s, t) = if i < 2 { ("v1", "v2") } else { ("v3", "v4") };
        push_bipath(&mut edges, &format!("x{i}"), s, t, b);
    }
    push_path(&mut edges, "q1_", "v1", "v3", p1);
    push_path(&mut edges, "q2_", "v2", "v4", p2);
    build(vec![], edges)
}

/// Parses an inline generator spec such as `grid:3,4`, `cycle:5` or `f2:3,1,2`.
///
/// Bipath families take `order,len1,len2` (uniform over all gaps and
/// bipaths); `f3` takes a fourth value for both connector lengths.
pub fn from_spec(spec: &str) -> Result<Graph> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let args: Vec<usize> = if rest.is_empty() {
        vec![]
    } else {
        rest.split(',')
            .map(|x| x.trim().parse().map_err(|_| crate::Error::Input(format!("bad number {x:?} in {spec:?}"))))
            .collect::<Result<_>>()?
    };
    let want = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            input(format!("{kind} expects {n} parameter(s), got {}", args.len()))
        }
    };
    let bipath = |a: &[usize]| -> Result<Bipath> {
        match a {
            [] => Ok(default_bipath()),
            [o, x, y] if *o >= 2 => Ok(vec![(*x, *y); o - 1]),
            _ => input("bipath parameters are order,len1,len2"),
        }
    };
    match kind {
        "path" => want(1).and_then(|_| path(args[0])),
        "cycle" => want(1).and_then(|_| cycle(args[0])),
        "complete" => want(1).and_then(|_| complete(args[0])),
        "complete_bipartite" => want(2).and_then(|_| complete_bipartite(args[0], args[1])),
        "grid" => want(2).and_then(|_| grid(args[0], args[1])),
        "perfect_binary_tree" => want(1).and_then(|_| perfect_binary_tree(args[0])),
        "spider" => spider(&args),
        "subdivided_k4" => want(0).map(|_| subdivided_k4()),
        "f1" | "F1" => match args.as_slice() {
            [] => Ok(f1(0)),
            [s] => Ok(f1(*s)),
            _ => input("f1 takes at most one parameter"),
        },
        "f2" | "F2" => {
            let b = bipath(&args)?;
            f2(&[b.clone(), b.clone(), b])
        }
        "f3" | "F3" => {
            let (b, c) = match args.as_slice() {
                [] => (default_bipath(), 1),
                [o, x, y, c] => (bipath(&[*o, *x, *y])?, *c),
                _ => return input("f3 parameters are order,len1,len2,connector"),
            };
            f3(&[b.clone(), b.clone(), b.clone(), b], c, c)
        }
        _ => input(format!("unknown generator {kind:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_2x2_is_c4() {
        let g = grid(2, 2).unwrap();
        assert_eq!(g.labels(), ["v0", "v1", "v2", "v3"]);
        assert_eq!(g.m(), 4);
        assert!((0..4).all(|v| g.degree(v) == 2));
    }

    #[test]
    fn sizes() {
        assert_eq!(complete(4).unwrap().m(), 6);
        assert_eq!(perfect_binary_tree(2).unwrap().n(), 7);
        let k4s = subdivided_k4();
        assert_eq!((k4s.n(), k4s.m()), (8, 10));
        assert_eq!(f1(1).n(), 10);
        let f2d = f2(&[default_bipath(), default_bipath(), default_bipath()]).unwrap();
        assert_eq!(f2d.n(), 2 + 3 * 5);
        assert_eq!(from_spec("f2:3,1,2").unwrap().n(), 11);
        assert_eq!(from_spec("f3:3,1,2,1").unwrap().n(), 16);
        assert_eq!(from_spec("f3").unwrap().n(), 4 + 4 * 5);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(path(0).is_err());
        assert!(cycle(2).is_err());
        assert!(grid(1, 5).is_err());
        assert!(f2(&[vec![(1, 1), (2, 2)], default_bipath(), default_bipath()]).is_err());
        assert!(from_spec("grid:3").is_err());
        assert!(from_spec("nope:1").is_err());
    }
}
