//! Build bodies from JSON specs and query gauge, support and boundary points.
use convgeom::{Body, BodySpec};

fn main() -> convgeom::Result<()> {
    let specs = [
        r#"{"kind":"ellipsoid","q":[[0.25,0],[0,1]]}"#,
        r#"{"kind":"pball","p":4,"scale":[1,1]}"#,
        r#"{"kind":"polygon","vertices":[[1,-1],[1,1],[-1,1],[-1,-1]]}"#,
        r#"{"kind":"linear","m":[[1,0.5],[0,1]],"inner":{"kind":"ellipsoid","q":[[1,0],[0,1]]}}"#,
    ];
    let u = [0.6, 0.8];
    for text in specs {
        let spec = BodySpec::from_json(text).expect("spec parses");
        let body = Body::from_spec(&spec)?;
        let y = body.boundary_point(&u);
        println!(
            "{text}\n  gauge(u) = {:.6}  support(u) = {:.6}  boundary point for normal u = ({:.6}, {:.6})  smooth = {}",
            body.gauge(&u),
            body.support(&u),
            y[0],
            y[1],
            body.is_smooth()
        );
    }
    Ok(())
}
