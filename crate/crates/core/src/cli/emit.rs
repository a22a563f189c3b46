//! One-way geometry output: SVG polylines for planar profiles, OBJ meshes for spatial ones.

use std::fmt::Write;

use crate::convolution::RadialProfile;

/// The closed boundary polyline of a planar profile, y axis pointing up.
pub fn profile_svg(profile: &RadialProfile) -> String {
    let pts = profile.points();
    let r = pts
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0, f64::max)
        * 1.05;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="512" height="512">"#,
        -r,
        -r,
        2.0 * r,
        2.0 * r
    )
    .unwrap();
    let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", p[0], -p[1])).collect();
    writeln!(
        s,
        r#"<polygon points="{}" fill="none" stroke="black" stroke-width="{}"/>"#,
        coords.join(" "),
        r / 200.0
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

/// Vertices `r(u) u` with the icosphere triangles of the profile grid.
pub fn profile_obj(profile: &RadialProfile) -> String {
    let mut s = String::from("# convolution body profile\n");
    for p in profile.points() {
        writeln!(s, "v {} {} {}", p[0], p[1], p[2]).unwrap();
    }
    for t in &profile.grid.triangles {
        writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{Body, DirectionGrid};
    use crate::convolution::body_profile;

    #[test]
    fn svg_and_obj_shapes() {
        let sq = Body::square(1.0).unwrap();
        let p = body_profile(&sq, &DirectionGrid::circle(8).unwrap()).unwrap();
        let svg = profile_svg(&p);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("1,-0 "));
        let ball = Body::ball(3, 1.0).unwrap();
        let p = body_profile(&ball, &DirectionGrid::icosphere(1).unwrap()).unwrap();
        let obj = profile_obj(&p);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 42);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 80);
    }
}
