use std::ptr;

use recon_ffi::*;

fn circle(n: usize) -> *mut ReconCloud {
    let mut cloud = ptr::null_mut();
    let st = unsafe { recon_cloud_generate(ReconManifold::Circle, 1.0, 0.0, n, 1e-4, 7, &mut cloud) };
    assert_eq!(st, ReconStatus::Ok);
    cloud
}

#[test]
fn circle_round_trip() {
    let cloud = circle(64);
    unsafe {
        assert_eq!(recon_cloud_len(cloud), 64);
        assert_eq!(recon_cloud_dim(cloud), 2);
        let params = ReconParams {
            d: 1,
            epsilon: 0.05,
            rho: 0.0,
            scale_r: 0.0,
            complex: ReconComplex::Rips,
            seed: 3,
        };
        let mut result = ptr::null_mut();
        assert_eq!(recon_reconstruct(cloud, &params, &mut result), ReconStatus::Ok);
        assert_eq!(recon_result_ok(result), 1);
        assert_eq!(recon_result_matches_delloc(result), 1);
        assert_eq!(recon_result_dim(result), 1);
        assert_eq!(recon_result_euler_characteristic(result), 0);
        let n = recon_result_support_size(result);
        assert_eq!(n, 64);
        let mut verts = vec![0usize; 2 * n];
        let mut coef = vec![0.0; n];
        assert_eq!(recon_result_support(result, verts.as_mut_ptr(), coef.as_mut_ptr()), ReconStatus::Ok);
        let mut degree = vec![0.0; 64];
        for (e, c) in verts.chunks(2).zip(&coef) {
            assert_eq!(c.abs(), 1.0);
            degree[e[0]] -= c;
            degree[e[1]] += c;
        }
        assert!(degree.iter().all(|&x| x == 0.0));
        assert!(recon_result_energy(result) > 0.0);
        let json = recon_result_report_json(result);
        assert!(c_str(json).unwrap().contains("\"matches_delloc\": true"));
        recon_string_free(json);
        recon_result_free(result);
        recon_cloud_free(cloud);
    }
}

#[test]
fn cloud_from_coordinates() {
    let coords = [0.0, 0.0, 1.0, 0.5, -2.0, 3.0];
    let mut cloud = ptr::null_mut();
    unsafe {
        assert_eq!(recon_cloud_new(coords.as_ptr(), 3, 2, &mut cloud), ReconStatus::Ok);
        let mut p = [0.0; 2];
        assert_eq!(recon_cloud_point(cloud, 2, p.as_mut_ptr()), ReconStatus::Ok);
        assert_eq!(p, [-2.0, 3.0]);
        assert_eq!(recon_cloud_point(cloud, 3, p.as_mut_ptr()), ReconStatus::NotFound);
        recon_cloud_free(cloud);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let st = recon_cloud_new(ptr::null(), 3, 2, ptr::null_mut());
        assert_eq!(st, ReconStatus::NullPointer);
        assert!(c_str(recon_last_error()).unwrap().contains("null"));

        let mut cloud = ptr::null_mut();
        let st = recon_cloud_new([1.0].as_ptr(), 1, 0, &mut cloud);
        assert_eq!(st, ReconStatus::InvalidInput);
        assert!(cloud.is_null());

        let st = recon_cloud_generate(ReconManifold::Torus, 1.0, 2.0, 100, 0.0, 0, &mut cloud);
        assert_eq!(st, ReconStatus::InvalidInput);
        assert!(!c_str(recon_last_error()).unwrap().is_empty());

        let cloud = circle(16);
        let params =
            ReconParams { d: 1, epsilon: 0.2, rho: 0.0, scale_r: 0.0, complex: ReconComplex::Rips, seed: 0 };
        assert_eq!(recon_reconstruct(cloud, ptr::null(), &mut ptr::null_mut()), ReconStatus::NullPointer);
        let mut result = ptr::null_mut();
        assert_eq!(recon_reconstruct(cloud, &params, ptr::null_mut()), ReconStatus::NullPointer);
        let bad = ReconParams { d: 0, ..params };
        assert_ne!(recon_reconstruct(cloud, &bad, &mut result), ReconStatus::Ok);
        assert!(result.is_null());
        recon_cloud_free(cloud);
        recon_cloud_free(ptr::null_mut());
        recon_result_free(ptr::null_mut());
        assert_eq!(recon_result_ok(ptr::null()), 0);
        assert_eq!(recon_result_matches_delloc(ptr::null()), -1);
    }
}

#[test]
fn version_string() {
    let v = unsafe { c_str(recon_version()) }.unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/recon.h")).unwrap();
    let source = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"recon.h\"\nint main(void) {\n  ReconCloud *c = NULL;\n  ReconStatus s = recon_cloud_generate(RECON_MANIFOLD_CIRCLE, 1.0, 0.0, 32, 0.0, 1, &c);\n  recon_cloud_free(c);\n  return s == RECON_STATUS_OK ? 0 : 1;\n}\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
