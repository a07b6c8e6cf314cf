use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::complex::Chain;
use crate::fmt::g17;
use crate::geom::PointCloud;
use crate::{ReconError, Result};

#[derive(Deserialize)]
struct CloudJson {
    dim: usize,
    points: Vec<Vec<f64>>,
}

/// Reads a point cloud from a JSON document `{"dim": N, "points": [...]}` or
/// from CSV with one point per line. Blank lines and lines starting with `#`
/// are ignored in CSV.
pub fn ingest(path: &Path) -> Result<PointCloud> {
    let text = std::fs::read_to_string(path).map_err(|e| ReconError::Io(format!("{}: {e}", path.display())))?;
    parse_cloud(&text)
}

pub fn parse_cloud(text: &str) -> Result<PointCloud> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_csv(text)
    }
}

fn parse_json(text: &str) -> Result<PointCloud> {
    let doc: CloudJson =
        serde_json::from_str(text).map_err(|e| ReconError::Parse { line: e.line(), message: e.to_string() })?;
    if doc.dim == 0 {
        return Err(ReconError::Parse { line: 1, message: "dim must be positive".into() });
    }
    if let Some(i) = doc.points.iter().position(|p| p.len() != doc.dim) {
        return Err(ReconError::Parse {
            line: 1,
            message: format!("point {i} has {} coordinates, expected {}", doc.points[i].len(), doc.dim),
        });
    }
    let coords = doc.points.into_iter().flatten().collect();
    PointCloud::new(doc.dim, coords)
}

fn parse_csv(text: &str) -> Result<PointCloud> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut dim = None;
    let mut coords = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| ReconError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        match dim {
            None => dim = Some(record.len()),
            Some(n) if n != record.len() => {
                return Err(ReconError::Parse { line, message: format!("{} coordinates, expected {n}", record.len()) })
            }
            Some(_) => {}
        }
        for f in &record {
            let x = f.parse::<f64>().ok().filter(|x| x.is_finite());
            coords.push(x.ok_or_else(|| ReconError::Parse { line, message: format!("`{f}` is not a finite number") })?);
        }
    }
    let dim = dim.ok_or_else(|| ReconError::Parse { line: 1, message: "no points".into() })?;
    PointCloud::new(dim, coords)
}

pub fn cloud_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|&x| g17(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn cloud_json(cloud: &PointCloud) -> String {
    crate::fmt::to_json(&serde_json::json!({ "dim": cloud.dim(), "points": cloud.to_vecs() }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl std::str::FromStr for MeshFormat {
    type Err = ReconError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(MeshFormat::Off),
            "obj" => Ok(MeshFormat::Obj),
            other => Err(ReconError::UnsupportedFormat(format!("mesh format `{other}`"))),
        }
    }
}

/// Mesh of the support of `chain`. All samples become vertices; a simplex
/// with a negative coefficient is written with its last two vertices
/// swapped. OFF takes triangles; OBJ takes edges (`l`) or triangles (`f`).
/// Points in the plane get a zero third coordinate.
pub fn export_mesh(chain: &Chain, cloud: &PointCloud, format: MeshFormat) -> Result<String> {
    let d = chain.dim();
    if cloud.dim() > 3 {
        return Err(ReconError::UnsupportedFormat(format!("meshes need points in R^2 or R^3, got R^{}", cloud.dim())));
    }
    match (format, d) {
        (MeshFormat::Off, 2) | (MeshFormat::Obj, 1 | 2) => {}
        _ => return Err(ReconError::UnsupportedFormat(format!("{d}-chains cannot be written as {format:?}"))),
    }
    let cells: Vec<Vec<usize>> = chain
        .sorted_entries()
        .into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|(s, c)| {
            let mut v = s.vertices().to_vec();
            if c < 0.0 {
                let k = v.len();
                v.swap(k - 2, k - 1);
            }
            v
        })
        .collect();
    let coords = |p: &[f64]| -> String {
        let mut xyz: Vec<String> = p.iter().map(|&x| g17(x)).collect();
        xyz.resize(3, "0".into());
        xyz.join(" ")
    };
    let mut out = String::new();
    match format {
        MeshFormat::Off => {
            let _ = writeln!(out, "OFF\n{} {} 0", cloud.len(), cells.len());
            for p in cloud.points() {
                let _ = writeln!(out, "{}", coords(p));
            }
            for c in &cells {
                let _ = writeln!(out, "3 {} {} {}", c[0], c[1], c[2]);
            }
        }
        MeshFormat::Obj => {
            for p in cloud.points() {
                let _ = writeln!(out, "v {}", coords(p));
            }
            let tag = if d == 1 { 'l' } else { 'f' };
            for c in &cells {
                let idx: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
                let _ = writeln!(out, "{tag} {}", idx.join(" "));
            }
        }
    }
    Ok(out)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| ReconError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Simplex;

    #[test]
    fn csv_and_ragged_rows() {
        let c = parse_cloud("1,2,3\n4,5,6\n\n7,8,9\n").unwrap();
        assert_eq!((c.len(), c.dim()), (3, 3));
        match parse_cloud("1,2\n3,4\n5\n") {
            Err(ReconError::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_cloud("1,x\n"), Err(ReconError::Parse { line: 1, .. })));
    }

    #[test]
    fn json_round_trip() {
        let c = PointCloud::from_points(&[vec![0.1, 1.0 / 3.0], vec![-2e-300, 7.0]]).unwrap();
        assert_eq!(parse_cloud(&cloud_json(&c)).unwrap(), c);
        assert_eq!(parse_cloud(&cloud_csv(&c)).unwrap(), c);
        assert!(matches!(parse_cloud("{\"dim\": 2, \"points\": [[1]]}"), Err(ReconError::Parse { .. })));
    }

    #[test]
    fn off_orientation() {
        let cloud = PointCloud::from_points(&[vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let t = Simplex::new(vec![0, 1, 2]).unwrap();
        let pos = export_mesh(&Chain::from_entries(2, [(t.clone(), 1.0)]), &cloud, MeshFormat::Off).unwrap();
        assert_eq!(pos, "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
        let neg = export_mesh(&Chain::from_entries(2, [(t, -1.0)]), &cloud, MeshFormat::Off).unwrap();
        assert!(neg.ends_with("3 0 2 1\n"));
    }

    #[test]
    fn obj_polyline_and_unsupported() {
        let cloud = PointCloud::from_points(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let c = Chain::from_entries(1, [(Simplex::edge(0, 1), 1.0), (Simplex::edge(1, 2), 1.0), (Simplex::edge(0, 2), -1.0)]);
        let obj = export_mesh(&c, &cloud, MeshFormat::Obj).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count(), 3);
        assert!(obj.contains("v 1 0 0\n") && obj.contains("l 3 1\n"));
        assert!(matches!(export_mesh(&c, &cloud, MeshFormat::Off), Err(ReconError::UnsupportedFormat(_))));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
    }
}
