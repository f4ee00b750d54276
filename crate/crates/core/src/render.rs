//! Deterministic SVG figures of packings and their scaffolding.

use std::fmt::Write as _;

use crate::ellipse::Ellipse;
use crate::geom::{bbox_of, Aabb, ConvexPolygon, Point2, Triangle, Vec2};

#[derive(Debug, Clone)]
pub struct RenderOptions {
    /// Draw the λ-enlargement of every ellipse as a dashed outline.
    pub enlarged: Option<f64>,
    pub triangles: Vec<Triangle>,
    pub polygons: Vec<ConvexPolygon>,
    /// Visible window in plane units; defaults to the bounding box of the scene.
    pub viewport: Option<Aabb>,
    pub width_px: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            enlarged: None,
            triangles: Vec::new(),
            polygons: Vec::new(),
            viewport: None,
            width_px: 800.0,
        }
    }
}

fn scene_bounds(ellipses: &[Ellipse], opts: &RenderOptions) -> Aabb {
    let mut pts: Vec<Point2> = Vec::new();
    for e in ellipses {
        let b = e.bbox();
        pts.push(b.min);
        pts.push(b.max);
    }
    for t in &opts.triangles {
        pts.extend_from_slice(&t.v);
    }
    for p in &opts.polygons {
        pts.extend_from_slice(p.vertices());
    }
    if pts.is_empty() {
        return Aabb::new(Vec2::ZERO, Vec2::new(1.0, 1.0));
    }
    let b = bbox_of(&pts);
    let pad = 0.02 * b.diagonal().max(1e-9);
    Aabb::new(b.min - Vec2::new(pad, pad), b.max + Vec2::new(pad, pad))
}

fn points_attr(pts: &[Point2]) -> String {
    pts.iter()
        .map(|p| format!("{},{}", p.x, p.y))
        .collect::<Vec<_>>()
        .join(" ")
}

fn ellipse_element(out: &mut String, e: &Ellipse, style: &str) {
    let c = e.canonical();
    let _ = writeln!(
        out,
        r#"<ellipse cx="{}" cy="{}" rx="{}" ry="{}" transform="rotate({} {} {})" {style}/>"#,
        c.center.x,
        c.center.y,
        c.semi_major,
        c.semi_minor,
        c.angle.to_degrees(),
        c.center.x,
        c.center.y,
    );
}

/// Renders the scene with the plane's y-axis pointing up.
pub fn render_svg(ellipses: &[Ellipse], opts: &RenderOptions) -> String {
    let view = opts.viewport.unwrap_or_else(|| scene_bounds(ellipses, opts));
    let height_px = opts.width_px * view.height() / view.width();
    let stroke = view.diagonal() / 2000.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        opts.width_px,
        height_px,
        view.min.x,
        -view.max.y,
        view.width(),
        view.height(),
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)" stroke-width="{stroke}">"#);

    out.push_str("<g id=\"scaffold\" fill=\"none\" stroke=\"#888888\">\n");
    for t in &opts.triangles {
        let _ = writeln!(out, r#"<polygon points="{}"/>"#, points_attr(&t.v));
    }
    for p in &opts.polygons {
        let _ = writeln!(out, r#"<polygon points="{}"/>"#, points_attr(p.vertices()));
    }
    out.push_str("</g>\n");

    if let Some(lambda) = opts.enlarged {
        let dash = 4.0 * stroke;
        let _ = writeln!(
            out,
            "<g id=\"enlarged\" fill=\"none\" stroke=\"#d62728\" stroke-dasharray=\"{dash} {dash}\">"
        );
        for e in ellipses {
            if let Ok(big) = e.enlarge(lambda) {
                ellipse_element(&mut out, &big, "");
            }
        }
        out.push_str("</g>\n");
    }

    out.push_str("<g id=\"packing\" fill=\"#1f77b4\" fill-opacity=\"0.5\" stroke=\"#1f3f6f\">\n");
    for e in ellipses {
        ellipse_element(&mut out, e, "");
    }
    out.push_str("</g>\n</g>\n</svg>\n");
    out
}
