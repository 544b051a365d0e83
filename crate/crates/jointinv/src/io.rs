//! Versioned comma-separated text formats (tracks, scenes, reports) and the
//! three-view orthographic drawing.
//!
//! All formats are plain text so a research artifact stays inspectable:
//! `#`-prefixed comments and blank lines are skipped, header lines are
//! `key,value…` pairs, data rows start with an integer field. Floats are
//! written with 17 significant digits so every file round-trips losslessly
//! through `f64`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::Error;
use crate::geom::Vec3;
use crate::groups::Variant;
use crate::synth::{FrameBounds, ImagePoint, Picture, PictureTracks};

/// Serialize a float with 17 significant digits (lossless for `f64`).
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64, Error> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| format_error(path, line, format!("expected a number, got {field:?}")))?;
    if !v.is_finite() {
        return Err(format_error(
            path,
            line,
            format!("non-finite number {field:?}"),
        ));
    }
    Ok(v)
}

fn parse_usize(path: &Path, line: usize, field: &str) -> Result<usize, Error> {
    field
        .trim()
        .parse()
        .map_err(|_| format_error(path, line, format!("expected an integer, got {field:?}")))
}

/// Lines that carry content: (1-based line number, text without comments).
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

// ---------------------------------------------------------------------------
// Tracks files
// ---------------------------------------------------------------------------

const TRACKS_FORMAT: &str = "tracks-v1";

/// Write point tracks: a header (format, variant, n, t, focal(s), bounds)
/// followed by one `tau,id,u,v` row per observation, pictures outer, ids
/// ascending.
pub fn write_tracks(
    path: &Path,
    tracks: &PictureTracks,
    variant: Variant,
) -> Result<(), Error> {
    let mut out = String::new();
    let _ = writeln!(out, "# point tracks over {} pictures", tracks.t());
    let _ = writeln!(out, "format,{TRACKS_FORMAT}");
    let _ = writeln!(out, "variant,{variant}");
    let _ = writeln!(out, "n,{}", tracks.n());
    let _ = writeln!(out, "t,{}", tracks.t());
    let focals: Vec<f64> = tracks.pictures.iter().map(|p| p.focal).collect();
    if focals.windows(2).all(|w| w[0] == w[1]) {
        let _ = writeln!(out, "focal,{}", fmt_float(focals[0]));
    } else {
        let joined: Vec<String> = focals.iter().map(|&f| fmt_float(f)).collect();
        let _ = writeln!(out, "focals,{}", joined.join(","));
    }
    let b = tracks.bounds;
    let _ = writeln!(
        out,
        "bounds,{},{},{},{}",
        fmt_float(b.u_min),
        fmt_float(b.u_max),
        fmt_float(b.v_min),
        fmt_float(b.v_max)
    );
    for (tau, picture) in tracks.pictures.iter().enumerate() {
        let mut points = picture.points.clone();
        points.sort_by_key(|p| p.id);
        for p in points {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                tau + 1,
                p.id,
                fmt_float(p.u),
                fmt_float(p.v)
            );
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a tracks file back into [`PictureTracks`] plus the variant named in
/// its header. Enforces: dense ids 1…n, every (tau, id) pair exactly once,
/// tau within [1, t], focal count matching t.
pub fn read_tracks(path: &Path) -> Result<(PictureTracks, Variant), Error> {
    let text = std::fs::read_to_string(path)?;
    let mut header: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut rows: Vec<(usize, u32, u32, f64, f64)> = Vec::new();
    for (lineno, line) in content_lines(&text) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[0].trim().parse::<u32>().is_ok() {
            if fields.len() != 4 {
                return Err(format_error(
                    path,
                    lineno,
                    format!("data row needs tau,id,u,v (got {} fields)", fields.len()),
                ));
            }
            let tau = parse_usize(path, lineno, fields[0])?;
            let id = parse_usize(path, lineno, fields[1])? as u32;
            let u = parse_f64(path, lineno, fields[2])?;
            let v = parse_f64(path, lineno, fields[3])?;
            rows.push((lineno, tau as u32, id, u, v));
        } else {
            let key = fields[0].trim().to_string();
            let value = fields[1..].join(",");
            if header.insert(key.clone(), (lineno, value)).is_some() {
                return Err(format_error(
                    path,
                    lineno,
                    format!("duplicate header key {key:?}"),
                ));
            }
        }
    }
    let take = |key: &str| -> Result<(usize, String), Error> {
        header
            .get(key)
            .cloned()
            .ok_or_else(|| format_error(path, 0, format!("missing header key {key:?}")))
    };
    let (fl, format) = take("format")?;
    if format != TRACKS_FORMAT {
        return Err(format_error(
            path,
            fl,
            format!("expected format {TRACKS_FORMAT}, got {format:?}"),
        ));
    }
    let (vl, variant_str) = take("variant")?;
    let variant = Variant::from_str(&variant_str)
        .map_err(|e| format_error(path, vl, e.to_string()))?;
    let (nl, n_str) = take("n")?;
    let n = parse_usize(path, nl, &n_str)?;
    let (tl, t_str) = take("t")?;
    let t = parse_usize(path, tl, &t_str)?;
    if n == 0 || t == 0 {
        return Err(format_error(path, nl.max(tl), "n and t must be positive"));
    }
    let focals: Vec<f64> = match (header.get("focal"), header.get("focals")) {
        (Some((fl, f)), None) => vec![parse_f64(path, *fl, f)?; t],
        (None, Some((fl, fs))) => {
            let parts: Vec<&str> = fs.split(',').collect();
            if parts.len() != t {
                return Err(format_error(
                    path,
                    *fl,
                    format!("focals lists {} values for t={t}", parts.len()),
                ));
            }
            parts
                .iter()
                .map(|p| parse_f64(path, *fl, p))
                .collect::<Result<_, _>>()?
        }
        (Some(_), Some((fl, _))) => {
            return Err(format_error(path, *fl, "give either focal or focals, not both"));
        }
        (None, None) => {
            return Err(format_error(path, 0, "missing header key \"focal\" or \"focals\""));
        }
    };
    let (bl, bounds_str) = take("bounds")?;
    let parts: Vec<&str> = bounds_str.split(',').collect();
    if parts.len() != 4 {
        return Err(format_error(path, bl, "bounds needs u_min,u_max,v_min,v_max"));
    }
    let bvals: Vec<f64> = parts
        .iter()
        .map(|p| parse_f64(path, bl, p))
        .collect::<Result<_, _>>()?;
    if bvals[0] >= bvals[1] || bvals[2] >= bvals[3] {
        return Err(format_error(path, bl, "bounds must satisfy u_min < u_max and v_min < v_max"));
    }
    let bounds = FrameBounds {
        u_min: bvals[0],
        u_max: bvals[1],
        v_min: bvals[2],
        v_max: bvals[3],
    };

    let mut grid: Vec<Vec<Option<(f64, f64)>>> = vec![vec![None; n]; t];
    for (lineno, tau, id, u, v) in rows {
        if tau < 1 || tau as usize > t {
            return Err(format_error(path, lineno, format!("tau {tau} outside [1, {t}]")));
        }
        if id < 1 || id as usize > n {
            return Err(format_error(path, lineno, format!("id {id} outside [1, {n}]")));
        }
        let cell = &mut grid[tau as usize - 1][id as usize - 1];
        if cell.is_some() {
            return Err(format_error(
                path,
                lineno,
                format!("duplicate observation (tau {tau}, id {id})"),
            ));
        }
        *cell = Some((u, v));
    }
    let mut pictures = Vec::with_capacity(t);
    for (tau, row) in grid.iter().enumerate() {
        let mut points = Vec::with_capacity(n);
        for (i, cell) in row.iter().enumerate() {
            let (u, v) = cell.ok_or_else(|| {
                format_error(
                    path,
                    0,
                    format!("missing observation (tau {}, id {})", tau + 1, i + 1),
                )
            })?;
            points.push(ImagePoint {
                id: (i + 1) as u32,
                u,
                v,
            });
        }
        pictures.push(Picture {
            focal: focals[tau],
            points,
        });
    }
    let tracks = PictureTracks::new(bounds, pictures)?;
    Ok((tracks, variant))
}

// ---------------------------------------------------------------------------
// Scene files (point clouds)
// ---------------------------------------------------------------------------

const SCENE_FORMAT: &str = "scene-v1";

/// Write a point cloud as `id,x,y,z` rows under a `format,scene-v1` header.
pub fn write_scene(path: &Path, points: &[(u32, Vec3)]) -> Result<(), Error> {
    let mut out = String::new();
    let _ = writeln!(out, "format,{SCENE_FORMAT}");
    for (id, p) in points {
        let _ = writeln!(
            out,
            "{id},{},{},{}",
            fmt_float(p.x),
            fmt_float(p.y),
            fmt_float(p.z)
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a scene file; ids must be unique.
pub fn read_scene(path: &Path) -> Result<Vec<(u32, Vec3)>, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut points: Vec<(u32, Vec3)> = Vec::new();
    let mut saw_format = false;
    for (lineno, line) in content_lines(&text) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[0].trim() == "format" {
            if fields[1..].join(",") != SCENE_FORMAT {
                return Err(format_error(
                    path,
                    lineno,
                    format!("expected format {SCENE_FORMAT}"),
                ));
            }
            saw_format = true;
            continue;
        }
        if fields.len() != 4 {
            return Err(format_error(
                path,
                lineno,
                format!("point row needs id,x,y,z (got {} fields)", fields.len()),
            ));
        }
        let id = parse_usize(path, lineno, fields[0])? as u32;
        if points.iter().any(|(other, _)| *other == id) {
            return Err(format_error(path, lineno, format!("duplicate id {id}")));
        }
        points.push((
            id,
            Vec3::new(
                parse_f64(path, lineno, fields[1])?,
                parse_f64(path, lineno, fields[2])?,
                parse_f64(path, lineno, fields[3])?,
            ),
        ));
    }
    if !saw_format {
        return Err(format_error(path, 0, "missing header key \"format\""));
    }
    if points.is_empty() {
        return Err(format_error(path, 0, "scene file has no points"));
    }
    Ok(points)
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

const REPORT_FORMAT: &str = "report-v1";

/// One record of a report: a scalar or a named table.
#[derive(Debug, Clone, PartialEq)]
pub enum ReportEntry {
    KeyValue {
        key: String,
        value: String,
    },
    Table {
        name: String,
        columns: Vec<String>,
        rows: Vec<Vec<String>>,
    },
}

/// Structured key-value + table output, written as
/// `value,<key>,<v>` / `table,<name>,<cols…>` / `row,<cells…>` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<ReportEntry>,
}

fn assert_field(s: &str) {
    assert!(
        !s.contains(',') && !s.contains('\n') && !s.is_empty(),
        "report fields must be non-empty and free of commas/newlines: {s:?}"
    );
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push_str(&mut self, key: &str, value: &str) {
        assert_field(key);
        assert_field(value);
        self.entries.push(ReportEntry::KeyValue {
            key: key.to_string(),
            value: value.to_string(),
        });
    }

    /// Numeric fields must be finite.
    pub fn push_float(&mut self, key: &str, value: f64) -> Result<(), Error> {
        if !value.is_finite() {
            return Err(Error::DegenerateConfiguration(format!(
                "report field {key} is not finite: {value}"
            )));
        }
        self.push_str(key, &fmt_float(value));
        Ok(())
    }

    pub fn push_int(&mut self, key: &str, value: usize) {
        self.push_str(key, &value.to_string());
    }

    /// Start a table; `rows` cells must already be formatted.
    pub fn push_table(&mut self, name: &str, columns: &[&str], rows: Vec<Vec<String>>) {
        assert_field(name);
        for c in columns {
            assert_field(c);
        }
        for row in &rows {
            assert_eq!(row.len(), columns.len(), "table {name}: ragged row");
            for cell in row {
                assert_field(cell);
            }
        }
        self.entries.push(ReportEntry::Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        });
    }

    /// Value of the first `key,value` entry with this key, if any.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find_map(|e| match e {
            ReportEntry::KeyValue { key: k, value } if k == key => Some(value.as_str()),
            _ => None,
        })
    }
}

pub fn write_report(path: &Path, report: &Report) -> Result<(), Error> {
    let mut out = String::new();
    let _ = writeln!(out, "format,{REPORT_FORMAT}");
    for entry in &report.entries {
        match entry {
            ReportEntry::KeyValue { key, value } => {
                let _ = writeln!(out, "value,{key},{value}");
            }
            ReportEntry::Table {
                name,
                columns,
                rows,
            } => {
                let _ = writeln!(out, "table,{name},{}", columns.join(","));
                for row in rows {
                    let _ = writeln!(out, "row,{}", row.join(","));
                }
            }
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<Report, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut report = Report::new();
    let mut saw_format = false;
    for (lineno, line) in content_lines(&text) {
        let fields: Vec<&str> = line.split(',').collect();
        match fields[0] {
            "format" => {
                if fields[1..].join(",") != REPORT_FORMAT {
                    return Err(format_error(
                        path,
                        lineno,
                        format!("expected format {REPORT_FORMAT}"),
                    ));
                }
                saw_format = true;
            }
            "value" => {
                if fields.len() != 3 {
                    return Err(format_error(path, lineno, "value line needs value,key,v"));
                }
                report.push_str(fields[1], fields[2]);
            }
            "table" => {
                if fields.len() < 3 {
                    return Err(format_error(path, lineno, "table line needs table,name,cols…"));
                }
                report.entries.push(ReportEntry::Table {
                    name: fields[1].to_string(),
                    columns: fields[2..].iter().map(|c| c.to_string()).collect(),
                    rows: Vec::new(),
                });
            }
            "row" => match report.entries.last_mut() {
                Some(ReportEntry::Table { columns, rows, .. }) => {
                    let cells: Vec<String> =
                        fields[1..].iter().map(|c| c.to_string()).collect();
                    if cells.len() != columns.len() {
                        return Err(format_error(
                            path,
                            lineno,
                            format!(
                                "row has {} cells for a {}-column table",
                                cells.len(),
                                columns.len()
                            ),
                        ));
                    }
                    rows.push(cells);
                }
                _ => {
                    return Err(format_error(path, lineno, "row outside any table"));
                }
            },
            other => {
                return Err(format_error(
                    path,
                    lineno,
                    format!("unknown record type {other:?}"),
                ));
            }
        }
    }
    if !saw_format {
        return Err(format_error(path, 0, "missing header key \"format\""));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Three-view drawing
// ---------------------------------------------------------------------------

/// Write an SVG with three orthographic views of a reconstruction — top
/// (x, y), front (x, z), side (y, z) — object points as dots, camera
/// centers as open squares.
pub fn write_three_view_svg(
    path: &Path,
    object_points: &[Vec3],
    camera_centers: &[Vec3],
) -> Result<(), Error> {
    const PANEL: f64 = 320.0;
    const MARGIN: f64 = 36.0;
    let views: [(&str, fn(Vec3) -> (f64, f64)); 3] = [
        ("top (x, y)", |p| (p.x, p.y)),
        ("front (x, z)", |p| (p.x, p.z)),
        ("side (y, z)", |p| (p.y, p.z)),
    ];
    let width = 3.0 * PANEL + 4.0 * MARGIN;
    let height = PANEL + 2.0 * MARGIN + 18.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(out, "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>");
    for (k, (label, proj)) in views.iter().enumerate() {
        let all: Vec<(f64, f64)> = object_points
            .iter()
            .chain(camera_centers.iter())
            .map(|&p| proj(p))
            .collect();
        let (mut lo_x, mut hi_x) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut lo_y, mut hi_y) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(a, b) in &all {
            lo_x = lo_x.min(a);
            hi_x = hi_x.max(a);
            lo_y = lo_y.min(b);
            hi_y = hi_y.max(b);
        }
        let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
        let pad = 0.08 * span;
        let scale = PANEL / (span + 2.0 * pad);
        let cx = 0.5 * (lo_x + hi_x);
        let cy = 0.5 * (lo_y + hi_y);
        let ox = MARGIN + k as f64 * (PANEL + MARGIN);
        let oy = MARGIN;
        let to_px = |(a, b): (f64, f64)| {
            (
                ox + PANEL / 2.0 + (a - cx) * scale,
                oy + PANEL / 2.0 - (b - cy) * scale,
            )
        };
        let _ = writeln!(
            out,
            "<rect x=\"{ox}\" y=\"{oy}\" width=\"{PANEL}\" height=\"{PANEL}\" fill=\"none\" stroke=\"#999\"/>"
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\">{label}</text>",
            ox,
            oy + PANEL + 16.0
        );
        for &p in object_points {
            let (x, y) = to_px(proj(p));
            let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"#1f77b4\"/>");
        }
        for &p in camera_centers {
            let (x, y) = to_px(proj(p));
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"8\" height=\"8\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>",
                x - 4.0,
                y - 4.0
            );
        }
    }
    let _ = writeln!(out, "</svg>");
    std::fs::write(path, out)?;
    Ok(())
}
