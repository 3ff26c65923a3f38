//! Line-oriented text format:
//!
//! ```text
//! tetmesh 1
//! nodes N        followed by N lines `x y z`
//! tets M         followed by M lines of 4 zero-based node indices
//! dirichlet K    followed by K lines `node fx fy fz` (0/1 flags)
//! neumann L      followed by L lines `n1 n2 n3 tx ty tz`
//! ```
//!
//! `#` starts a comment; blank lines are ignored.

use super::{Mesh, MeshError, NeumannFace};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

pub fn write_mesh_string(mesh: &Mesh) -> String {
    let mut s = String::new();
    s.push_str("tetmesh 1\n");
    let _ = writeln!(s, "nodes {}", mesh.nodes.len());
    for p in &mesh.nodes {
        let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
    }
    let _ = writeln!(s, "tets {}", mesh.tets.len());
    for t in &mesh.tets {
        let _ = writeln!(s, "{} {} {} {}", t[0], t[1], t[2], t[3]);
    }
    let constrained: Vec<_> = mesh
        .dirichlet
        .iter()
        .enumerate()
        .filter(|(_, f)| f.iter().any(|&b| b))
        .collect();
    let _ = writeln!(s, "dirichlet {}", constrained.len());
    for (n, f) in constrained {
        let _ = writeln!(s, "{} {} {} {}", n, f[0] as u8, f[1] as u8, f[2] as u8);
    }
    let _ = writeln!(s, "neumann {}", mesh.neumann.len());
    for f in &mesh.neumann {
        let _ = writeln!(
            s,
            "{} {} {} {} {} {}",
            f.nodes[0], f.nodes[1], f.nodes[2], f.traction[0], f.traction[1], f.traction[2]
        );
    }
    s
}

pub fn write_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    std::fs::write(path, write_mesh_string(mesh))?;
    Ok(())
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh, MeshError> {
    read_mesh_str(&std::fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-empty line with comments stripped, as (1-based line number, tokens).
    fn next_tokens(&mut self) -> Result<(usize, Vec<&'a str>), MeshError> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if !tokens.is_empty() {
                return Ok((i + 1, tokens));
            }
        }
        Err(MeshError::Parse {
            line: self.last + 1,
            message: "unexpected end of file".into(),
        })
    }

    fn header(&mut self, keyword: &str) -> Result<usize, MeshError> {
        let (line, tokens) = self.next_tokens()?;
        if tokens.len() != 2 || tokens[0] != keyword {
            return Err(MeshError::Parse {
                line,
                message: format!("expected `{keyword} <count>`, found `{}`", tokens.join(" ")),
            });
        }
        parse(line, tokens[1])
    }

    fn record<const N: usize>(&mut self, what: &str) -> Result<(usize, [&'a str; N]), MeshError> {
        let (line, tokens) = self.next_tokens()?;
        let arr: [&str; N] = tokens.try_into().map_err(|t: Vec<&str>| MeshError::Parse {
            line,
            message: format!("{what} record needs {N} fields, found {}", t.len()),
        })?;
        Ok((line, arr))
    }
}

fn parse<T: FromStr>(line: usize, token: &str) -> Result<T, MeshError> {
    token.parse().map_err(|_| MeshError::Parse {
        line,
        message: format!("cannot parse `{token}`"),
    })
}

fn flag(line: usize, token: &str) -> Result<bool, MeshError> {
    match token {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(MeshError::Parse {
            line,
            message: format!("flag must be 0 or 1, found `{token}`"),
        }),
    }
}

fn node_ref(line: usize, token: &str, n_nodes: usize) -> Result<usize, MeshError> {
    let v: usize = parse(line, token)?;
    if v >= n_nodes {
        return Err(MeshError::Parse {
            line,
            message: format!("node index {v} out of range ({n_nodes} nodes)"),
        });
    }
    Ok(v)
}

pub fn read_mesh_str(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (line, tokens) = lines.next_tokens()?;
    if tokens != ["tetmesh", "1"] {
        return Err(MeshError::Parse {
            line,
            message: "missing `tetmesh 1` header".into(),
        });
    }

    let n = lines.header("nodes")?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, [x, y, z]) = lines.record::<3>("node")?;
        nodes.push([parse(line, x)?, parse(line, y)?, parse(line, z)?]);
    }

    let m = lines.header("tets")?;
    let mut tets = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, t) = lines.record::<4>("tet")?;
        let mut tet = [0usize; 4];
        for k in 0..4 {
            tet[k] = node_ref(line, t[k], n)?;
        }
        tets.push(tet);
    }

    let k = lines.header("dirichlet")?;
    let mut dirichlet = vec![[false; 3]; n];
    for _ in 0..k {
        let (line, [node, fx, fy, fz]) = lines.record::<4>("dirichlet")?;
        let node = node_ref(line, node, n)?;
        dirichlet[node] = [flag(line, fx)?, flag(line, fy)?, flag(line, fz)?];
    }

    let l = lines.header("neumann")?;
    let mut neumann = Vec::with_capacity(l);
    for _ in 0..l {
        let (line, r) = lines.record::<6>("neumann")?;
        neumann.push(NeumannFace {
            nodes: [
                node_ref(line, r[0], n)?,
                node_ref(line, r[1], n)?,
                node_ref(line, r[2], n)?,
            ],
            traction: [parse(line, r[3])?, parse(line, r[4])?, parse(line, r[5])?],
        });
    }

    if let Ok((line, tokens)) = lines.next_tokens() {
        return Err(MeshError::Parse {
            line,
            message: format!("trailing content `{}`", tokens.join(" ")),
        });
    }

    let mesh = Mesh {
        nodes,
        tets,
        dirichlet,
        neumann,
    };
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_box_mesh, BoxFace, FaceConstraint, FaceTraction};

    fn unit_box() -> Mesh {
        generate_box_mesh(
            [1.0; 3],
            [2, 1, 1],
            &[FaceConstraint {
                face: BoxFace::XMin,
                components: [true, false, true],
            }],
            &[FaceTraction {
                face: BoxFace::XMax,
                traction: [0.25, 0.0, -1.5],
            }],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_identity() {
        let m = unit_box();
        let back = read_mesh_str(&write_mesh_string(&m)).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# a tet\ntetmesh 1\n\nnodes 4  # four\n0 0 0\n1 0 0\n0 1 0\n0 0 1\ntets 1\n0 1 2 3\ndirichlet 1\n0 1 1 1\nneumann 0\n";
        let m = read_mesh_str(text).unwrap();
        assert_eq!(m.n_tets(), 1);
        assert_eq!(m.dirichlet[0], [true; 3]);
    }

    #[test]
    fn negative_volume_is_invariant_violation() {
        let text = "tetmesh 1\nnodes 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\ntets 1\n0 2 1 3\ndirichlet 1\n0 1 1 1\nneumann 0\n";
        assert!(matches!(read_mesh_str(text), Err(MeshError::InvariantViolation(_))));
    }

    #[test]
    fn truncated_file_is_parse_error() {
        let full = write_mesh_string(&unit_box());
        let cut: String = full.lines().take(10).map(|l| format!("{l}\n")).collect();
        match read_mesh_str(&cut) {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 11),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_token_reports_line() {
        let text = "tetmesh 1\nnodes 1\n0 zero 0\n";
        match read_mesh_str(text) {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
