//! SVG rendering of an analysis: terrain, contours, clusters and separations.

use std::fmt::Write;

use terrasect::geometry::{Point, Polygon};
use terrasect::map::{MapData, ResourceKind};
use terrasect::regions::{AnalysisResult, ChokeGeometry, ChokeKind};
use terrasect::Tile;

const SCALE: f64 = 8.0;

const UNWALKABLE: &str = "#1e1e1e";
const UNBUILDABLE: &str = "#3d6fd1";
const HEIGHT_FILLS: [&str; 4] = ["#f2e36b", "#bdb76b", "#5fa84f", "#2f7f6f"];
const MINERAL: &str = "#37c8f0";
const GAS: &str = "#1f9e4a";

fn px(v: f64) -> String {
    let s = format!("{:.3}", v * SCALE);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn path_data(poly: &Polygon) -> String {
    let mut d = String::new();
    for ring in poly.rings() {
        for (i, p) in ring.iter().enumerate() {
            let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, px(p.xf()), px(p.yf()));
        }
        d.push_str("Z ");
    }
    d.trim_end().to_string()
}

fn tile_fill(map: &MapData, t: Tile) -> Option<&'static str> {
    let g = &map.grid;
    if !g.walkable(t) {
        None
    } else if !g.buildable(t) {
        Some(UNBUILDABLE)
    } else {
        Some(HEIGHT_FILLS[g.height_level(t).min(3) as usize])
    }
}

/// Renders the result over its map. Output depends only on the inputs.
pub fn render_svg(result: &AnalysisResult, map: &MapData) -> String {
    let (w, h) = (map.grid.width() as f64, map.grid.height() as f64);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        px(w),
        px(h),
        px(w),
        px(h)
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{}" height="{}" fill="{UNWALKABLE}"/>"#, px(w), px(h));

    s.push_str("<g id=\"terrain\" shape-rendering=\"crispEdges\">\n");
    for y in 0..map.grid.height() as i32 {
        let mut x = 0;
        while x < map.grid.width() as i32 {
            let fill = tile_fill(map, Tile::new(x, y));
            let start = x;
            while x < map.grid.width() as i32 && tile_fill(map, Tile::new(x, y)) == fill {
                x += 1;
            }
            if let Some(f) = fill {
                let _ = writeln!(
                    s,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{f}"/>"#,
                    px(start as f64),
                    px(y as f64),
                    px((x - start) as f64),
                    px(1.0)
                );
            }
        }
    }
    for r in &map.resources {
        let fill = match r.kind {
            ResourceKind::Mineral => MINERAL,
            ResourceKind::Gas => GAS,
        };
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
            px(r.position.x as f64 + 0.15),
            px(r.position.y as f64 + 0.15),
            px(0.7),
            px(0.7)
        );
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"regions\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"3 2\">\n");
    for r in &result.regions {
        let _ = writeln!(s, r#"<path d="{}"/>"#, path_data(&r.polygon));
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"contours\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\">\n");
    for c in &result.components {
        let _ = writeln!(s, r#"<path d="{}"/>"#, path_data(&c.polygon));
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"clusters\">\n");
    for c in &result.clusters {
        let per_zone = result.zones.iter().find(|z| z.id == c.zone).map_or(1, |z| z.clusters.len());
        let color = if per_zone >= 2 { "#e02020" } else { "#2040e0" };
        let (lo, hi) = c.bounding_box;
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            px(lo.x as f64 - 0.5),
            px(lo.y as f64 - 0.5),
            px((hi.x - lo.x) as f64 + 2.0),
            px((hi.y - lo.y) as f64 + 2.0)
        );
        for m in &c.members {
            let p = Point::tile_center(m.position.x as i64, m.position.y as i64);
            let _ = writeln!(
                s,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#ff9900" stroke-width="1"/>"##,
                px(c.centroid.xf()),
                px(c.centroid.yf()),
                px(p.xf()),
                px(p.yf())
            );
        }
        let _ = writeln!(
            s,
            r##"<circle cx="{}" cy="{}" r="3" fill="#e02020"/>"##,
            px(c.centroid.xf()),
            px(c.centroid.yf())
        );
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"separations\" stroke=\"#ff0000\" stroke-width=\"3\" stroke-linecap=\"round\">\n");
    for c in &result.choke_points {
        if let (ChokeKind::Separation, ChokeGeometry::Segment(seg)) = (c.kind, &c.geometry) {
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                px(seg.a.xf()),
                px(seg.a.yf()),
                px(seg.b.xf()),
                px(seg.b.yf())
            );
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}
