//! Recursive coordinate bisection of tet centroids and the torn (per-subdomain)
//! numbering that the domain decomposition solver works on.

use super::{sorted_face, tet_faces, Mesh, MeshError};
use std::collections::{BTreeMap, HashMap};

/// Local view of one subdomain. Local node `a` is global node `nodes[a]`;
/// its displacement occupies torn dofs `dof_offset + 3a .. dof_offset + 3a + 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdomain {
    pub nodes: Vec<usize>,
    /// Global tet ids owned by this subdomain.
    pub tets: Vec<usize>,
    /// The same tets in local node numbering.
    pub local_tets: Vec<[usize; 4]>,
    pub dof_offset: usize,
}

impl Subdomain {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_dofs(&self) -> usize {
        3 * self.nodes.len()
    }

    pub fn local_coords(&self, mesh: &Mesh) -> Vec<[f64; 3]> {
        self.nodes.iter().map(|&g| mesh.nodes[g]).collect()
    }
}

/// A global node shared by subdomains `p < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterfacePair {
    pub node: usize,
    pub p: usize,
    pub q: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub subdomain_of_tet: Vec<usize>,
    pub subdomains: Vec<Subdomain>,
    pub interface_pairs: Vec<InterfacePair>,
    /// For each global node, its `(subdomain, local node)` copies in subdomain order.
    pub node_copies: Vec<Vec<(usize, usize)>>,
    pub n_torn_dofs: usize,
}

impl Decomposition {
    pub fn n_subdomains(&self) -> usize {
        self.subdomains.len()
    }

    /// Builds the torn numbering from a tet-to-subdomain map.
    pub fn from_assignment(mesh: &Mesh, subdomain_of_tet: Vec<usize>, s: usize) -> Decomposition {
        let mut tets_of: Vec<Vec<usize>> = vec![Vec::new(); s];
        for (t, &p) in subdomain_of_tet.iter().enumerate() {
            tets_of[p].push(t);
        }
        let mut node_copies: Vec<Vec<(usize, usize)>> = vec![Vec::new(); mesh.n_nodes()];
        let mut subdomains = Vec::with_capacity(s);
        let mut offset = 0;
        for (p, tets) in tets_of.into_iter().enumerate() {
            let mut nodes: Vec<usize> = tets.iter().flat_map(|&t| mesh.tets[t]).collect();
            nodes.sort_unstable();
            nodes.dedup();
            let local: HashMap<usize, usize> = nodes.iter().enumerate().map(|(a, &g)| (g, a)).collect();
            let local_tets = tets
                .iter()
                .map(|&t| {
                    let g = mesh.tets[t];
                    [local[&g[0]], local[&g[1]], local[&g[2]], local[&g[3]]]
                })
                .collect();
            for (a, &g) in nodes.iter().enumerate() {
                node_copies[g].push((p, a));
            }
            let sub = Subdomain {
                nodes,
                tets,
                local_tets,
                dof_offset: offset,
            };
            offset += sub.n_dofs();
            subdomains.push(sub);
        }
        let mut interface_pairs = Vec::new();
        for (node, copies) in node_copies.iter().enumerate() {
            for (i, &(p, _)) in copies.iter().enumerate() {
                for &(q, _) in &copies[i + 1..] {
                    interface_pairs.push(InterfacePair { node, p, q });
                }
            }
        }
        Decomposition {
            subdomain_of_tet,
            subdomains,
            interface_pairs,
            node_copies,
            n_torn_dofs: offset,
        }
    }

    /// Scatters a global nodal vector (3 per node) to the torn layout.
    pub fn tear(&self, global: &[f64]) -> Vec<f64> {
        let mut torn = vec![0.0; self.n_torn_dofs];
        for sub in &self.subdomains {
            for (a, &g) in sub.nodes.iter().enumerate() {
                for k in 0..3 {
                    torn[sub.dof_offset + 3 * a + k] = global[3 * g + k];
                }
            }
        }
        torn
    }

    /// Averages the copies of each node back into a global nodal vector.
    pub fn glue_average(&self, torn: &[f64]) -> Vec<f64> {
        let mut global = vec![0.0; 3 * self.node_copies.len()];
        for (g, copies) in self.node_copies.iter().enumerate() {
            if copies.is_empty() {
                continue;
            }
            let w = 1.0 / copies.len() as f64;
            for &(p, a) in copies {
                let off = self.subdomains[p].dof_offset + 3 * a;
                for k in 0..3 {
                    global[3 * g + k] += w * torn[off + k];
                }
            }
        }
        global
    }

    /// Sums the copies of each node (the transpose of [`Decomposition::tear`]).
    pub fn glue_sum(&self, torn: &[f64]) -> Vec<f64> {
        let mut global = vec![0.0; 3 * self.node_copies.len()];
        for sub in &self.subdomains {
            for (a, &g) in sub.nodes.iter().enumerate() {
                for k in 0..3 {
                    global[3 * g + k] += torn[sub.dof_offset + 3 * a + k];
                }
            }
        }
        global
    }
}

fn bisect(mesh: &Mesh, centroids: &[[f64; 3]], mut tets: Vec<usize>, s: usize, first_id: usize, out: &mut [usize]) {
    if s == 1 {
        for t in tets {
            out[t] = first_id;
        }
        return;
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &t in &tets {
        for k in 0..3 {
            lo[k] = lo[k].min(centroids[t][k]);
            hi[k] = hi[k].max(centroids[t][k]);
        }
    }
    let mut axis = 0;
    for k in 1..3 {
        if hi[k] - lo[k] > hi[axis] - lo[axis] {
            axis = k;
        }
    }
    tets.sort_by(|&a, &b| centroids[a][axis].total_cmp(&centroids[b][axis]).then(a.cmp(&b)));
    let s_left = s / 2;
    let split = (tets.len() * s_left + s / 2) / s;
    let split = split.clamp(s_left, tets.len() - (s - s_left));
    let right = tets.split_off(split);
    bisect(mesh, centroids, tets, s_left, first_id, out);
    bisect(mesh, centroids, right, s - s_left, first_id + s_left, out);
}

/// Moves every face-disconnected fragment of a subdomain (other than its
/// largest piece) to the neighbouring subdomain it shares the most faces with.
/// Face-connected subdomains have exactly the six rigid body modes as kernel.
fn merge_fragments(mesh: &Mesh, owner: &mut [usize], s: usize) {
    let faces = mesh.face_map();
    let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); mesh.n_tets()];
    for (t, tet) in mesh.tets.iter().enumerate() {
        for f in tet_faces(tet) {
            if let Some(list) = faces.get(&sorted_face(f)) {
                neighbours[t].extend(list.iter().copied().filter(|&o| o != t));
            }
        }
    }
    for _ in 0..4 * s + 4 {
        let mut component = vec![usize::MAX; mesh.n_tets()];
        let mut components: Vec<(usize, Vec<usize>)> = Vec::new();
        for start in 0..mesh.n_tets() {
            if component[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = vec![start];
            component[start] = id;
            let mut head = 0;
            while head < members.len() {
                let t = members[head];
                head += 1;
                for &o in &neighbours[t] {
                    if owner[o] == owner[t] && component[o] == usize::MAX {
                        component[o] = id;
                        members.push(o);
                    }
                }
            }
            components.push((owner[start], members));
        }
        let mut largest: Vec<Option<usize>> = vec![None; s];
        for (id, (p, members)) in components.iter().enumerate() {
            match largest[*p] {
                Some(best) if components[best].1.len() >= members.len() => {}
                _ => largest[*p] = Some(id),
            }
        }
        let mut moved = false;
        for (id, (p, members)) in components.iter().enumerate() {
            if largest[*p] == Some(id) {
                continue;
            }
            let mut shared: BTreeMap<usize, usize> = BTreeMap::new();
            for &t in members {
                for &o in &neighbours[t] {
                    if owner[o] != *p {
                        *shared.entry(owner[o]).or_default() += 1;
                    }
                }
            }
            if let Some((&target, _)) = shared.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))) {
                for &t in members {
                    owner[t] = target;
                }
                moved = true;
            }
        }
        if !moved {
            return;
        }
    }
}

/// Splits the mesh into `s` subdomains by recursive coordinate bisection of
/// tet centroids along the longest extent.
pub fn partition(mesh: &Mesh, s: usize) -> Result<Decomposition, MeshError> {
    if s == 0 || s > mesh.n_tets() {
        return Err(MeshError::TooManySubdomains {
            requested: s,
            tets: mesh.n_tets(),
        });
    }
    let centroids: Vec<[f64; 3]> = (0..mesh.n_tets()).map(|t| mesh.tet_centroid(t)).collect();
    let mut owner = vec![0usize; mesh.n_tets()];
    bisect(mesh, &centroids, (0..mesh.n_tets()).collect(), s, 0, &mut owner);
    if s > 1 {
        merge_fragments(mesh, &mut owner, s);
    }
    Ok(Decomposition::from_assignment(mesh, owner, s))
}
