#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "raingap/report.hpp"

// End-to-end tests driving the installed binary; run from the build
// directory (as ctest does) so ./raingap resolves.

namespace fs = std::filesystem;
using nlohmann::json;
using namespace raingap;

namespace {

int run(const std::string& cmd) {
    int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const std::string kDir = "cli_scratch";

struct Workspace {
    Workspace() {
        fs::remove_all(kDir);
        fs::create_directories(kDir);
    }
};

std::string path(const std::string& name) { return kDir + "/" + name; }

// One shared pipeline run: synth -> tune -> impute -> baseline.
void ensure_pipeline() {
    static bool done = false;
    if (done) return;
    Workspace ws;
    REQUIRE(run("./raingap synth --sites 2 --gauges 3 --days 15 --seed 42 --out " +
                path("data")) == 0);
    REQUIRE(run("./raingap tune --dataset " + path("data") + " --store " +
                path("tuned.json") + " --grid desk --seed 1 --threads 4") == 0);
    REQUIRE(run("./raingap impute --dataset " + path("data") + " --store " +
                path("tuned.json") + " --site S01 --seed 7 --imputer-trees 5" +
                " --threads 4 --report " + path("impute.json") + " --predictions " +
                path("series.csv")) == 0);
    REQUIRE(run("./raingap baseline --dataset " + path("data") +
                " --site S01 --seed 7 --report " + path("baseline.json")) == 0);
    done = true;
}

}  // namespace

TEST_CASE("synth writes a loadable dataset and is seed-deterministic") {
    ensure_pipeline();
    CHECK(fs::exists(path("data/S01.csv")));
    CHECK(fs::exists(path("data/S02.csv")));
    CHECK(fs::exists(path("data/catalog.csv")));
    CHECK(fs::exists(path("data/dataset.json")));
    CHECK(fs::exists(path("data/truth/S01.csv")));

    REQUIRE(run("./raingap synth --sites 2 --gauges 3 --days 15 --seed 42 --out " +
                path("data2")) == 0);
    CHECK(file_digest(path("data/S01.csv")) == file_digest(path("data2/S01.csv")));
    CHECK(file_digest(path("data/catalog.csv")) == file_digest(path("data2/catalog.csv")));

    REQUIRE(run("./raingap synth --sites 2 --gauges 3 --days 15 --seed 43 --out " +
                path("data3")) == 0);
    CHECK(file_digest(path("data/S01.csv")) != file_digest(path("data3/S01.csv")));
}

TEST_CASE("tune persists parameters for every site, family, and task") {
    ensure_pipeline();
    TunedStore store = TunedStore::load(path("tuned.json"));
    for (const std::string& site : {"S01", "S02"})
        for (Family f : kFamilyOrder)
            for (Task t : {Task::Classify, Task::Regress})
                CHECK(store.contains(site, f, t));
}

TEST_CASE("impute emits a hurdle report and a rerun is byte-identical") {
    ensure_pipeline();
    json report = load_report(path("impute.json"));
    CHECK(report.at("kind") == "hurdle");
    CHECK(report.at("manifest").at("subcommand") == "impute");
    CHECK(report.at("manifest").at("fold_digest").get<std::string>().size() == 16);
    CHECK(report.at("metrics").at("acc").at("per_fold").size() == 5);
    CHECK(report.at("n_rows_scored").get<int>() > 600);

    REQUIRE(run("./raingap impute --dataset " + path("data") + " --store " +
                path("tuned.json") + " --site S01 --seed 7 --imputer-trees 5" +
                " --threads 2 --report " + path("impute_rerun.json")) == 0);
    CHECK(file_digest(path("impute.json")) == file_digest(path("impute_rerun.json")));
}

TEST_CASE("baseline report shares the impute fold plan and compares cleanly") {
    ensure_pipeline();
    json ml = load_report(path("impute.json"));
    json base = load_report(path("baseline.json"));
    CHECK(base.at("kind") == "baseline");
    CHECK(base.at("chosen_k").get<int>() >= 1);
    CHECK(base.at("manifest").at("fold_digest") == ml.at("manifest").at("fold_digest"));

    REQUIRE(run("./raingap compare --a " + path("impute.json") + " --b " +
                path("baseline.json") + " --out " + path("cmp.json")) == 0);
    json cmp = load_report(path("cmp.json"));
    CHECK(cmp.at("kind") == "compare");
    CHECK(cmp.at("metrics").at("rmse").at("mean_delta").is_number());

    SUBCASE("a report compared with itself is all zeros") {
        REQUIRE(run("./raingap compare --a " + path("impute.json") + " --b " +
                    path("impute.json") + " --out " + path("self.json")) == 0);
        json self = load_report(path("self.json"));
        for (const auto& [metric, entry] : self.at("metrics").items()) {
            (void)metric;
            if (!entry.at("mean_delta").is_null())
                CHECK(entry.at("mean_delta").get<double>() == 0.0);
        }
    }
}

TEST_CASE("compare arithmetic on hand-built reports") {
    ensure_pipeline();
    auto fabricate = [](double rmse_mean, std::vector<double> per_fold) {
        json m;
        for (const char* k : {"acc", "prec", "recall", "f1", "weighted_f1"})
            m[k] = {{"mean", 1.0}, {"sd", 0.0}, {"per_fold", {1.0, 1.0}}};
        m["r2"] = {{"mean", nullptr}, {"sd", nullptr}, {"per_fold", {nullptr, nullptr}}};
        m["rmse"] = {{"mean", rmse_mean}, {"sd", 0.0}, {"per_fold", per_fold}};
        return json{{"kind", "hurdle"},
                    {"manifest", {{"fold_digest", "f1x"}}},
                    {"metrics", m}};
    };
    write_report(fabricate(0.141, {0.14, 0.142}), path("a.json"));
    write_report(fabricate(0.151, {0.15, 0.152}), path("b.json"));
    REQUIRE(run("./raingap compare --a " + path("a.json") + " --b " + path("b.json") +
                " --out " + path("ab.json")) == 0);
    json cmp = load_report(path("ab.json"));
    CHECK(cmp.at("metrics").at("rmse").at("mean_delta").get<double>() ==
          doctest::Approx(-0.010).epsilon(1e-12));
    CHECK(cmp.at("metrics").at("rmse").at("per_fold_delta")[0].get<double>() ==
          doctest::Approx(-0.010));
    CHECK(cmp.at("metrics").at("r2").at("mean_delta").is_null());

    SUBCASE("mismatched fold plans are refused") {
        json other = fabricate(0.2, {0.2, 0.2});
        other["manifest"]["fold_digest"] = "different";
        write_report(other, path("c.json"));
        CHECK(run("./raingap compare --a " + path("a.json") + " --b " + path("c.json")) ==
              3);
    }
}

TEST_CASE("prediction series export and windowing") {
    ensure_pipeline();
    std::ifstream in(path("series.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "timestamp,truth,prediction");
    std::size_t total = 0;
    for (std::string line; std::getline(in, line);) total++;
    CHECK(total == 720);  // full lattice, missing cells left empty

    REQUIRE(run("./raingap export --series " + path("series.csv") +
                " --from 2020-01-01T00:00:00Z --to 2020-01-02T00:00:00Z --out " +
                path("window.csv")) == 0);
    std::ifstream win(path("window.csv"));
    std::getline(win, header);
    CHECK(header == "timestamp,truth,prediction");
    std::size_t n = 0;
    for (std::string line; std::getline(win, line);) n++;
    CHECK(n == 49);  // inclusive window, half-hourly

    CHECK(run("./raingap export --series " + path("series.csv") +
              " --from 1999-01-01T00:00:00Z --to 1999-01-02T00:00:00Z --out " +
              path("empty.csv")) == 3);
    CHECK(run("./raingap export --series " + path("series.csv") +
              " --from not-a-date --to 1999-01-02T00:00:00Z --out " +
              path("bad.csv")) == 3);
}

TEST_CASE("config file values apply unless a flag overrides them") {
    ensure_pipeline();
    {
        std::ofstream cfg(path("synth_cfg.json"));
        cfg << R"({"days": 15, "seed": 42, "gauges": 3, "sites": 2})";
    }
    REQUIRE(run("./raingap synth --config " + path("synth_cfg.json") + " --out " +
                path("data_cfg")) == 0);
    CHECK(file_digest(path("data_cfg/S01.csv")) == file_digest(path("data/S01.csv")));

    // Flag beats the config key.
    REQUIRE(run("./raingap synth --config " + path("synth_cfg.json") +
                " --seed 43 --out " + path("data_cfg2")) == 0);
    CHECK(file_digest(path("data_cfg2/S01.csv")) != file_digest(path("data/S01.csv")));

    {
        std::ofstream cfg(path("broken.json"));
        cfg << "{not json";
    }
    CHECK(run("./raingap synth --config " + path("broken.json") + " --out " +
              path("x")) == 2);
}

TEST_CASE("failure exit codes") {
    ensure_pipeline();
    CHECK(run("./raingap") == 2);                       // missing subcommand
    CHECK(run("./raingap frobnicate") == 2);            // unknown subcommand
    CHECK(run("./raingap compare --a only.json") == 2); // missing required flag
    CHECK(run("./raingap synth --no-such-flag 1 --out x") == 2);
    CHECK(run("./raingap impute --dataset " + path("data") + " --store " +
              path("tuned.json") + " --report r.json") == 2);  // no site/region
    CHECK(run("./raingap impute --dataset no/such/dir --store " + path("tuned.json") +
              " --site S01 --report r.json") == 3);
    CHECK(run("./raingap baseline --dataset " + path("data") +
              " --site NOPE --report r.json") == 3);
    CHECK(run("./raingap synth --days -4 --out " + path("y")) == 2);
}

TEST_CASE("regional impute reports per-site metrics") {
    ensure_pipeline();
    REQUIRE(run("./raingap tune --dataset " + path("data") + " --store " +
                path("tuned_region.json") + " --grid desk --seed 1 --threads 4" +
                " --region S01,S02") == 0);
    REQUIRE(run("./raingap impute --dataset " + path("data") + " --store " +
                path("tuned_region.json") + " --region S01,S02 --seed 7" +
                " --imputer-trees 5 --threads 4 --report " + path("regional.json")) == 0);
    json report = load_report(path("regional.json"));
    CHECK(report.at("kind") == "regional");
    REQUIRE(report.at("sites").size() == 2);
    CHECK(report.at("sites")[0].at("site_id") == "S01");
    CHECK(report.at("sites")[1].at("site_id") == "S02");
    CHECK(report.at("sites")[0].at("metrics").at("rmse").at("per_fold").size() == 5);
}
