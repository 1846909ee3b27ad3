//! Plain-text field files.
//!
//! ```text
//! # nx=16 ny=16 Lx=6.283185307179586 Ly=6.283185307179586 t=0 topology=doubly_periodic
//! <one line per stored row of constant y, x fastest>
//! ```
//! Values are written with 17 significant digits so a write/read cycle is
//! bit-identical.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::field::Field2D;
use super::grid::{GridSpec, Topology};

pub fn to_text(field: &Field2D, t: f64) -> String {
    let g = field.grid();
    let mut s = format!(
        "# nx={} ny={} Lx={:?} Ly={:?} t={:?} topology={}\n",
        g.nx, g.ny, g.lx, g.ly, t, g.topology
    );
    for j in 0..g.my() {
        for i in 0..g.mx() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.16e}", field.at(i, j));
        }
        s.push('\n');
    }
    s
}

/// Parses a field file, returning the field and its time stamp.
pub fn from_text(text: &str) -> Result<(Field2D, f64)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty field file".into()))?;
    let header = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("field file must start with a `#` header".into()))?;
    let (mut nx, mut ny, mut lx, mut ly, mut t, mut topo) = (None, None, None, None, None, None);
    for tok in header.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("malformed header token `{tok}`")))?;
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{v}` for `{k}`")))
        };
        let int = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad integer `{v}` for `{k}`")))
        };
        match k {
            "nx" => nx = Some(int(v)?),
            "ny" => ny = Some(int(v)?),
            "Lx" => lx = Some(num(v)?),
            "Ly" => ly = Some(num(v)?),
            "t" => t = Some(num(v)?),
            "topology" => topo = Some(Topology::parse(v)?),
            other => return Err(Error::Parse(format!("unknown header key `{other}`"))),
        }
    }
    let missing = |name: &str| Error::Parse(format!("header is missing `{name}`"));
    let grid = GridSpec::new(
        nx.ok_or_else(|| missing("nx"))?,
        ny.ok_or_else(|| missing("ny"))?,
        lx.ok_or_else(|| missing("Lx"))?,
        ly.ok_or_else(|| missing("Ly"))?,
        topo.unwrap_or(Topology::DoublyPeriodic),
    )?;
    let t = t.unwrap_or(0.0);
    let mut values = Vec::with_capacity(grid.len());
    let mut rows = 0;
    for (lineno, line) in lines {
        let before = values.len();
        for tok in line.split_whitespace() {
            values.push(tok.parse::<f64>().map_err(|_| {
                Error::Parse(format!("line {}: bad value `{tok}`", lineno + 1))
            })?);
        }
        if values.len() - before != grid.mx() {
            return Err(Error::Parse(format!(
                "line {}: expected {} values, got {}",
                lineno + 1,
                grid.mx(),
                values.len() - before
            )));
        }
        rows += 1;
    }
    if rows != grid.my() {
        return Err(Error::Parse(format!("expected {} rows, got {rows}", grid.my())));
    }
    let field = Field2D::from_values(grid, values)?;
    field.check_finite("field file")?;
    Ok((field, t))
}

pub fn write_field(path: &Path, field: &Field2D, t: f64) -> Result<()> {
    std::fs::write(path, to_text(field, t))?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<(Field2D, f64)> {
    from_text(&std::fs::read_to_string(path)?)
}
