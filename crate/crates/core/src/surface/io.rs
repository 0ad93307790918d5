//! OFF and OBJ triangle mesh files.
//!
//! Coordinates are written with 17 significant digits so that a save/load
//! round trip reproduces every `f64` bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::Point3;

use super::mesh::TriMesh;
use super::MeshError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self, MeshError> {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
        match ext.as_str() {
            "off" => Ok(MeshFormat::Off),
            "obj" => Ok(MeshFormat::Obj),
            _ => Err(MeshError::UnsupportedFormat(ext)),
        }
    }
}

pub fn load_mesh(path: &Path) -> Result<TriMesh, MeshError> {
    let text = fs::read_to_string(path)?;
    match MeshFormat::from_path(path)? {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

pub fn save_mesh(mesh: &TriMesh, path: &Path) -> Result<(), MeshError> {
    let text = match MeshFormat::from_path(path)? {
        MeshFormat::Off => write_off(mesh),
        MeshFormat::Obj => write_obj(mesh),
    };
    fs::write(path, text)?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse { line, message: message.into() }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, MeshError> {
    let x: f64 = tok.parse().map_err(|_| parse_err(line, format!("invalid number {tok:?}")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite coordinate {tok:?}")));
    }
    Ok(x)
}

pub fn parse_off(text: &str) -> Result<TriMesh, MeshError> {
    // Content lines with their 1-based line numbers, comments stripped.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, first) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let rest = match first.strip_prefix("OFF") {
        Some(r) => r.trim(),
        None => return Err(parse_err(ln, "missing OFF header")),
    };
    let (ln, counts) = if rest.is_empty() {
        lines.next().ok_or_else(|| parse_err(ln, "missing counts line"))?
    } else {
        (ln, rest)
    };
    let nums: Vec<&str> = counts.split_whitespace().collect();
    if nums.len() < 2 {
        return Err(parse_err(ln, "expected vertex and face counts"));
    }
    let nv: usize = nums[0].parse().map_err(|_| parse_err(ln, "invalid vertex count"))?;
    let nf: usize = nums[1].parse().map_err(|_| parse_err(ln, "invalid face count"))?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, "unexpected end of file in vertex list"))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() < 3 {
            return Err(parse_err(ln, "vertex needs three coordinates"));
        }
        vertices.push(Point3::new(parse_f64(t[0], ln)?, parse_f64(t[1], ln)?, parse_f64(t[2], ln)?));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, "unexpected end of file in face list"))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        let k: usize = t.first().and_then(|s| s.parse().ok()).ok_or_else(|| parse_err(ln, "invalid face arity"))?;
        if k != 3 {
            return Err(parse_err(ln, format!("only triangles are supported, got a {k}-gon")));
        }
        if t.len() < 4 {
            return Err(parse_err(ln, "face needs three indices"));
        }
        let mut f = [0usize; 3];
        for j in 0..3 {
            let idx: usize = t[j + 1].parse().map_err(|_| parse_err(ln, format!("invalid face index {:?}", t[j + 1])))?;
            if idx >= nv {
                return Err(parse_err(ln, format!("face index {idx} out of range ({nv} vertices)")));
            }
            f[j] = idx;
        }
        faces.push(f);
    }
    TriMesh::new(vertices, faces)
}

pub fn parse_obj(text: &str) -> Result<TriMesh, MeshError> {
    let mut vertices = Vec::new();
    let mut raw_faces: Vec<(usize, [i64; 3])> = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let ln = i + 1;
        let l = l.split('#').next().unwrap_or("").trim();
        let mut t = l.split_whitespace();
        match t.next() {
            Some("v") => {
                let c: Vec<&str> = t.collect();
                if c.len() < 3 {
                    return Err(parse_err(ln, "vertex needs three coordinates"));
                }
                vertices.push(Point3::new(parse_f64(c[0], ln)?, parse_f64(c[1], ln)?, parse_f64(c[2], ln)?));
            }
            Some("f") => {
                let c: Vec<&str> = t.collect();
                if c.len() != 3 {
                    return Err(parse_err(ln, format!("only triangles are supported, got {} indices", c.len())));
                }
                let mut f = [0i64; 3];
                for j in 0..3 {
                    let s = c[j].split('/').next().unwrap_or("");
                    f[j] = s.parse().map_err(|_| parse_err(ln, format!("invalid face index {:?}", c[j])))?;
                    if f[j] == 0 {
                        return Err(parse_err(ln, "face index 0 is invalid in OBJ"));
                    }
                }
                raw_faces.push((ln, f));
            }
            _ => {}
        }
    }
    let nv = vertices.len() as i64;
    let mut faces = Vec::with_capacity(raw_faces.len());
    for (ln, f) in raw_faces {
        let mut out = [0usize; 3];
        for j in 0..3 {
            // negative indices count back from the end
            let idx = if f[j] > 0 { f[j] - 1 } else { nv + f[j] };
            if idx < 0 || idx >= nv {
                return Err(parse_err(ln, format!("face index {} out of range ({nv} vertices)", f[j])));
            }
            out[j] = idx as usize;
        }
        faces.push(out);
    }
    TriMesh::new(vertices, faces)
}

pub fn write_off(mesh: &TriMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "OFF");
    let _ = writeln!(s, "{} {} 0", mesh.vertex_count(), mesh.face_count());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
    }
    s
}

pub fn write_obj(mesh: &TriMesh) -> String {
    let mut s = String::new();
    for p in mesh.vertices() {
        let _ = writeln!(s, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRI: &str = "OFF\n# a comment\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n";

    #[test]
    fn parses_off() {
        let m = parse_off(TRI).unwrap();
        assert_eq!(m.vertex_count(), 4);
        assert_eq!(m.face_count(), 2);
    }

    #[test]
    fn bad_index_names_line() {
        let bad = TRI.replace("3 0 2 3", "3 0 2 9");
        match parse_off(&bad) {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 9),
            other => panic!("unexpected {other:?}"),
        }
        let bad = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 x\n";
        assert!(matches!(parse_obj(bad), Err(MeshError::Parse { line: 4, .. })));
    }

    #[test]
    fn obj_negative_and_slashed_indices() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2//2 -1\n").unwrap();
        assert_eq!(m.faces()[0], [0, 1, 2]);
    }

    #[test]
    fn formats_from_extension() {
        assert_eq!(MeshFormat::from_path(Path::new("a.OFF")).unwrap(), MeshFormat::Off);
        assert!(MeshFormat::from_path(Path::new("a.stl")).is_err());
    }
}
