//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "webdyn.h"

int main(void) {
    WebdynSeries *s = NULL;
    if (webdyn_series_generate("{\"seed\": 5, \"years\": 2, \"initial_sites\": 300}", &s) != WEBDYN_STATUS_OK) {
        fprintf(stderr, "generate: %s\n", webdyn_last_error());
        return 1;
    }
    size_t len = 0;
    webdyn_series_len(s, &len);
    WebdynStats st;
    webdyn_series_stats(s, 0, &st);
    uint64_t sizes[WEBDYN_COMPONENT_COUNT];
    webdyn_series_component_sizes(s, 0, sizes);
    uint64_t total = 0;
    for (int i = 0; i < WEBDYN_COMPONENT_COUNT; i++) total += sizes[i];
    int32_t label = 0;
    WebdynStatus bad = webdyn_series_label(s, 9, &label);
    webdyn_series_free(s);

    double pages[] = {612910, 794218, 2089406, 2551567, 3078901, 2844137, 7197032, 9367543};
    double factor = 0;
    webdyn_fit_growth(pages, 8, WEBDYN_GROWTH_METHOD_LOG_LINEAR, &factor);

    printf("%zu %llu %llu %d %.2f\n", len, (unsigned long long)st.crawled_sites,
           (unsigned long long)total, bad == WEBDYN_STATUS_OUT_OF_RANGE, factor);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    // Integration test binaries live in <target>/<profile>/deps.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libwebdyn_ffi.a");
    assert!(lib.is_file(), "missing {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let bin = dir.path().join("client");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let build = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .unwrap_or_else(|e| panic!("running {cc}: {e}"));
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));

    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8(run.stdout).unwrap().trim(), "2 300 300 1 1.45");
}
