//! Profile CSV and Wavefront OBJ.

use lawson_core::profiles::ProfilePoint;
use std::fmt::Write as _;

use crate::config::Provenance;
use crate::error::CliError;

/// Column header of profile files.
pub const PROFILE_HEADER: &str = "phi,V_norm,A_norm,A_competitor,margin,converged";

fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

/// Profile CSV: a provenance comment, the header, one row per point with 17
/// significant digits.
pub fn profile_csv(points: &[ProfilePoint], prov: &Provenance) -> String {
    let mut s = format!("# {}\n{PROFILE_HEADER}\n", prov.line());
    for p in points {
        let row = [p.phi, p.v_norm, p.a_norm, p.a_competitor, p.margin].map(num).join(",");
        writeln!(s, "{row},{}", u8::from(p.converged)).expect("string write");
    }
    s
}

/// Parse a profile CSV written by [`profile_csv`].
pub fn parse_profile_csv(text: &str) -> Result<Vec<ProfilePoint>, CliError> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    if lines.next() != Some(PROFILE_HEADER) {
        return Err(CliError::Io("missing profile header".into()));
    }
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 6 {
                return Err(CliError::Io(format!("bad profile row: {l}")));
            }
            let v = |i: usize| f[i].parse::<f64>().map_err(|e| CliError::Io(format!("{e}: {l}")));
            Ok(ProfilePoint {
                phi: v(0)?,
                v_norm: v(1)?,
                a_norm: v(2)?,
                a_competitor: v(3)?,
                margin: v(4)?,
                converged: f[5] == "1",
            })
        })
        .collect()
}

/// Triangle mesh as read from or written to OBJ.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjMesh {
    /// Vertex positions.
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based triangles.
    pub triangles: Vec<[usize; 3]>,
}

/// OBJ text with comment header lines (each prefixed by `# `). Coordinates
/// use the shortest representation that reads back exactly.
pub fn write_obj(vertices: &[[f64; 3]], triangles: &[[usize; 3]], header: &[String]) -> String {
    let mut s = String::with_capacity(40 * (vertices.len() + triangles.len()));
    for h in header {
        writeln!(s, "# {h}").expect("string write");
    }
    for v in vertices {
        writeln!(s, "v {:?} {:?} {:?}", v[0], v[1], v[2]).expect("string write");
    }
    for t in triangles {
        writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).expect("string write");
    }
    s
}

/// Parse vertices and faces of an OBJ file. Polygons are fanned into
/// triangles; texture and normal indices are ignored.
pub fn read_obj(text: &str) -> Result<ObjMesh, CliError> {
    let mut mesh = ObjMesh::default();
    for (n, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let bad = || CliError::Io(format!("obj line {}: {line}", n + 1));
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.take(3).map(|x| x.parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
                if c.len() != 3 {
                    return Err(bad());
                }
                mesh.vertices.push([c[0], c[1], c[2]]);
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|tok| {
                        let i: i64 = tok.split('/').next().unwrap_or("").parse().map_err(|_| bad())?;
                        let len = mesh.vertices.len() as i64;
                        let i = if i < 0 { len + i } else { i - 1 };
                        if i < 0 || i >= len {
                            return Err(bad());
                        }
                        Ok(i as usize)
                    })
                    .collect::<Result<_, _>>()?;
                if idx.len() < 3 {
                    return Err(bad());
                }
                for w in 1..idx.len() - 1 {
                    mesh.triangles.push([idx[0], idx[w], idx[w + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obj_roundtrip_is_exact() {
        let v = vec![[0.1, -2.0 / 3.0, 1e-300], [1.0, 2.0, 3.0], [std::f64::consts::PI, 0.0, -0.0]];
        let t = vec![[0, 1, 2]];
        let text = write_obj(&v, &t, &["test".into()]);
        assert!(text.starts_with("# test\n"));
        let m = read_obj(&text).unwrap();
        assert_eq!(m.vertices, v);
        assert_eq!(m.triangles, t);
    }

    #[test]
    fn obj_quads_and_slashes() {
        let m = read_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1 2/2 3/3 -1\n").unwrap();
        assert_eq!(m.triangles, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn csv_roundtrip() {
        let p = ProfilePoint { phi: 1.25, v_norm: 0.3, a_norm: 2.0, a_competitor: 1.9, margin: -0.1, converged: true };
        let q = ProfilePoint { phi: 1.5, v_norm: f64::NAN, a_norm: f64::NAN, a_competitor: f64::NAN, margin: f64::NAN, converged: false };
        let text = profile_csv(&[p, q], &Provenance::new("abc".into()));
        let back = parse_profile_csv(&text).unwrap();
        assert_eq!(back[0], p);
        assert!(!back[1].converged && back[1].margin.is_nan());
        assert!(text.lines().nth(2).unwrap().starts_with("1.2500000000000000e0,"));
    }
}
