//! Half-edge combinatorics for planar Wick pairings: rotation systems,
//! Euler-characteristic genus, and a gluing enumerator that generates
//! exactly the genus-zero connected pairings.

use crate::error::CoreError;

/// Genus data of a pairing on a rotation system: returns the Euler
/// characteristic V - E + F (equal to 2 - 2g for connected maps).
///
/// `rotations` lists each vertex's half-edges in cyclic order; `pairing` is
/// a perfect matching of all half-edge ids.
pub fn euler_characteristic(
    rotations: &[Vec<usize>],
    pairing: &[(usize, usize)],
) -> Result<i64, CoreError> {
    let total: usize = rotations.iter().map(|r| r.len()).sum();
    if total % 2 != 0 {
        return Err(CoreError::Structure(format!(
            "odd number of half-edges ({total}) cannot be paired"
        )));
    }
    let mut seen = vec![false; total];
    for r in rotations {
        for &h in r {
            if h >= total || seen[h] {
                return Err(CoreError::Structure("invalid rotation system".into()));
            }
            seen[h] = true;
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(CoreError::Structure("rotation system misses half-edges".into()));
    }
    let mut iota = vec![usize::MAX; total];
    for &(a, b) in pairing {
        if a == b || a >= total || b >= total || iota[a] != usize::MAX || iota[b] != usize::MAX {
            return Err(CoreError::Structure(
                "pairing is not a fixed-point-free involution".into(),
            ));
        }
        iota[a] = b;
        iota[b] = a;
    }
    if iota.iter().any(|&v| v == usize::MAX) {
        return Err(CoreError::Structure("pairing does not cover all half-edges".into()));
    }
    // rho: successor in the cyclic order around each vertex
    let mut rho = vec![0usize; total];
    for r in rotations {
        for (i, &h) in r.iter().enumerate() {
            rho[h] = r[(i + 1) % r.len()];
        }
    }
    // faces: cycles of rho o iota
    let mut visited = vec![false; total];
    let mut faces = 0i64;
    for start in 0..total {
        if visited[start] {
            continue;
        }
        faces += 1;
        let mut h = start;
        while !visited[h] {
            visited[h] = true;
            h = rho[iota[h]];
        }
    }
    let v = rotations.len() as i64;
    let e = (total / 2) as i64;
    Ok(v - e + faces)
}

/// Genus of a connected pairing (errors if the map is disconnected).
pub fn genus_of_pairing(
    rotations: &[Vec<usize>],
    pairing: &[(usize, usize)],
) -> Result<i64, CoreError> {
    if !is_connected(rotations, pairing) {
        return Err(CoreError::Structure("map is disconnected".into()));
    }
    let chi = euler_characteristic(rotations, pairing)?;
    Ok((2 - chi) / 2)
}

pub fn is_connected(rotations: &[Vec<usize>], pairing: &[(usize, usize)]) -> bool {
    let total: usize = rotations.iter().map(|r| r.len()).sum();
    let mut owner = vec![0usize; total];
    for (v, r) in rotations.iter().enumerate() {
        for &h in r {
            owner[h] = v;
        }
    }
    let n = rotations.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in pairing {
        let (ra, rb) = (find(&mut parent, owner[a]), find(&mut parent, owner[b]));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let r0 = find(&mut parent, 0);
    (0..n).all(|v| find(&mut parent, v) == r0)
}

/// Enumerate all fixed-point-free pairings (for brute-force cross-checks).
pub fn all_pairings(total: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..total).collect();
    fn rec(items: &mut Vec<usize>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if items.is_empty() {
            out.push(acc.clone());
            return;
        }
        let a = items[0];
        for i in 1..items.len() {
            let b = items[i];
            let mut rest: Vec<usize> = items[1..].to_vec();
            rest.remove(i - 1);
            acc.push((a, b));
            rec(&mut rest, acc, out);
            acc.pop();
        }
    }
    rec(&mut items, &mut Vec::new(), &mut out);
    out
}

/// Visitor-driven enumeration of genus-zero connected pairings of a
/// rotation system, by planar gluing: the smallest unpaired half-edge is
/// joined either to a half-edge on its own face (face split) or to one on a
/// face of another component (component merge). Components that close while
/// others remain open are pruned.
pub fn for_each_planar_connected<F: FnMut(&[(usize, usize)])>(
    rotations: &[Vec<usize>],
    mut visit: F,
) {
    let total: usize = rotations.iter().map(|r| r.len()).sum();
    if total % 2 != 0 {
        return;
    }
    // state: faces as cyclic vectors of unpaired half-edges; component id per face
    let faces: Vec<Vec<usize>> = rotations.iter().map(|r| r.clone()).collect();
    let comp: Vec<usize> = (0..faces.len()).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(total / 2);
    rec(faces, comp, &mut pairs, &mut visit);

    fn rec<F: FnMut(&[(usize, usize)])>(
        faces: Vec<Vec<usize>>,
        comp: Vec<usize>,
        pairs: &mut Vec<(usize, usize)>,
        visit: &mut F,
    ) {
        // find the globally smallest unpaired half-edge
        let mut best: Option<(usize, usize, usize)> = None; // (h, face, idx)
        for (fi, f) in faces.iter().enumerate() {
            for (i, &h) in f.iter().enumerate() {
                if best.map_or(true, |(bh, _, _)| h < bh) {
                    best = Some((h, fi, i));
                }
            }
        }
        let (h, fi, i) = match best {
            Some(b) => b,
            None => {
                // all paired; connectivity is enforced during merging
                visit(pairs);
                return;
            }
        };
        // (a) same-face partners: split the face
        let flen = faces[fi].len();
        for j in 0..flen {
            if j == i {
                continue;
            }
            let g = faces[fi][j];
            // split: walking from h: h, x1..xa, g, y1..yb  ->  (x..), (y..)
            let (lo, hi) = (i.min(j), i.max(j));
            let inner: Vec<usize> = faces[fi][lo + 1..hi].to_vec();
            let mut outer: Vec<usize> = faces[fi][hi + 1..].to_vec();
            outer.extend_from_slice(&faces[fi][..lo]);
            let mut nf = faces.clone();
            let mut nc = comp.clone();
            nf[fi] = inner;
            nf.push(outer);
            nc.push(comp[fi]);
            pairs.push((h, g));
            if component_viable(&nf, &nc) {
                rec(nf, nc, pairs, visit);
            }
            pairs.pop();
        }
        // (b) cross-component partners: merge faces
        for (gi, g_face) in faces.iter().enumerate() {
            if comp[gi] == comp[fi] {
                continue;
            }
            for (j, &g) in g_face.iter().enumerate() {
                let mut merged: Vec<usize> = faces[fi][i + 1..].to_vec();
                merged.extend_from_slice(&faces[fi][..i]);
                merged.extend_from_slice(&g_face[j + 1..]);
                merged.extend_from_slice(&g_face[..j]);
                let mut nf = faces.clone();
                let mut nc = comp.clone();
                let joined = comp[gi];
                nf[fi] = merged;
                nf[gi] = Vec::new();
                for c in nc.iter_mut() {
                    if *c == joined {
                        *c = comp[fi];
                    }
                }
                pairs.push((h, g));
                if component_viable(&nf, &nc) {
                    rec(nf, nc, pairs, visit);
                }
                pairs.pop();
            }
        }
    }

    // prune states where some component closed while others stay open:
    // such a component can never reconnect, the final map would split
    fn component_viable(faces: &[Vec<usize>], comp: &[usize]) -> bool {
        use std::collections::HashSet;
        let mut open: HashSet<usize> = HashSet::new();
        let mut all: HashSet<usize> = HashSet::new();
        for (k, f) in faces.iter().enumerate() {
            all.insert(comp[k]);
            if !f.is_empty() {
                open.insert(comp[k]);
            }
        }
        if open.is_empty() {
            return all.len() == 1;
        }
        all.len() == open.len()
    }
}
