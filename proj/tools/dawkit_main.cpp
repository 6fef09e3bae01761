// dawkit: offline renderer for declarative audio projects plus a tempo/key
// stem pairing tool.
//
//   dawkit render <project.json> --out <dir> [--sr N] [--block N]
//   dawkit pair --acapellas <manifest.json> --instrumentals <manifest.json>
//               [--emit-projects <dir>] [--w-tempo F] [--w-key F]
//   dawkit check-sum <project.json>
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "dawkit/errors.hpp"
#include "dawkit/pairing.hpp"
#include "dawkit/project.hpp"

namespace {

int exit_code_for(const dawkit::Error& e) {
    return e.code() == dawkit::ErrorCode::IoError ? 2 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"offline DAG audio renderer"};
    app.require_subcommand(1);

    std::string project_path;
    std::string out_dir = ".";
    double sr_override = 0.0;
    int block_override = 0;
    auto* render = app.add_subcommand("render", "render a project to per-node WAV stems");
    render->add_option("project", project_path, "project JSON file")->required();
    render->add_option("--out", out_dir, "output directory");
    render->add_option("--sr", sr_override, "override sample rate");
    render->add_option("--block", block_override, "override block size");

    std::string acap_manifest, instr_manifest, emit_dir;
    double w_tempo = 1.0, w_key = 1.0;
    auto* pair = app.add_subcommand("pair", "rank acapella/instrumental pairings");
    pair->add_option("--acapellas", acap_manifest, "acapella manifest JSON")->required();
    pair->add_option("--instrumentals", instr_manifest, "instrumental manifest JSON")->required();
    pair->add_option("--emit-projects", emit_dir, "write a mashup project per pair");
    pair->add_option("--w-tempo", w_tempo, "tempo weight");
    pair->add_option("--w-key", w_key, "key weight");

    std::string check_path;
    double check_tolerance = 1e-6;
    auto* check = app.add_subcommand("check-sum", "verify recorded buses equal their stem sums");
    check->add_option("project", check_path, "project JSON file")->required();
    check->add_option("--tolerance", check_tolerance, "max allowed deviation");

    CLI11_PARSE(app, argc, argv);

    try {
        if (render->parsed()) {
            dawkit::RenderOverrides overrides{sr_override, block_override};
            const auto written = dawkit::render_project(project_path, out_dir, overrides);
            for (const auto& path : written)
                std::printf("wrote %s\n", path.c_str());
            return 0;
        }

        if (pair->parsed()) {
            const auto acapellas = dawkit::load_manifest(acap_manifest);
            const auto instrumentals = dawkit::load_manifest(instr_manifest);
            const auto matches = dawkit::match_stems(acapellas, instrumentals, w_tempo, w_key);

            std::printf("%-4s %-28s %-28s %10s\n", "rank", "acapella", "instrumental", "distance");
            for (size_t i = 0; i < matches.size(); ++i) {
                const auto& m = matches[i];
                const auto aname =
                    std::filesystem::path(acapellas[static_cast<size_t>(m.acapella)].path)
                        .filename().string();
                const auto iname =
                    std::filesystem::path(instrumentals[static_cast<size_t>(m.instrumental)].path)
                        .filename().string();
                std::printf("%-4zu %-28s %-28s %10.4f\n", i + 1, aname.c_str(), iname.c_str(),
                            m.distance);
            }

            if (!emit_dir.empty()) {
                std::filesystem::create_directories(emit_dir);
                for (size_t i = 0; i < matches.size(); ++i) {
                    const auto& m = matches[i];
                    const auto path = (std::filesystem::path(emit_dir) /
                                       ("pair_" + std::to_string(i + 1) + ".json")).string();
                    dawkit::emit_pair_project(acapellas[static_cast<size_t>(m.acapella)],
                                              instrumentals[static_cast<size_t>(m.instrumental)],
                                              path);
                    std::printf("wrote %s\n", path.c_str());
                }
            }
            return 0;
        }

        if (check->parsed()) {
            const double worst = dawkit::check_sum(check_path, check_tolerance);
            std::printf("ok: max bus deviation %.3g\n", worst);
            return 0;
        }
    } catch (const dawkit::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
