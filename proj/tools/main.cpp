#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "nskd/box.hpp"
#include "nskd/eve.hpp"
#include "nskd/hashing.hpp"
#include "nskd/protocol.hpp"
#include "nskd/quantum.hpp"
#include "nskd/security.hpp"
#include "nskd/verify.hpp"

namespace {

using nlohmann::json;

void emit(const std::string& text, const std::string& out_file) {
    if (out_file.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream f(out_file, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file " + out_file);
        f << text;
        if (text.empty() || text.back() != '\n') f << "\n";
    }
}

std::vector<double> parse_grid(const std::string& spec) {
    // A:B:STEP inclusive grid
    double a, b, step;
    char c1, c2;
    std::istringstream is(spec);
    if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
        throw CLI::ValidationError("--p-grid must look like A:B:STEP");
    std::vector<double> grid;
    for (long long i = 0;; ++i) {
        const double p = a + step * static_cast<double>(i);
        if (p > b + 1e-12) break;
        grid.push_back(std::min(p, b));
    }
    return grid;
}

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    std::stringstream is(spec);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stoi(tok));
    if (out.empty()) throw CLI::ValidationError("empty list");
    return out;
}

json config_echo(const std::string& cmd, std::uint64_t seed, const std::string& format) {
    return json{{"command", cmd}, {"seed", seed}, {"format", format}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Device-independent key distribution against no-signaling eavesdroppers: "
                 "protocol simulator, security bounds, and desk-scale verification suites"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out_file;
    std::string format = "json";
    app.add_option("--seed", seed, "master RNG seed")->capture_default_str();
    app.add_option("--out", out_file, "write output to a file instead of stdout");
    app.add_option("--format", format, "output format where both are defined")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the full protocol on a noisy-EPR source");
    long long sim_n = 100000;
    int sim_m = 6;
    std::string sim_delta = "auto";
    double sim_p = 1.0;
    double sim_margin = 0.15;
    std::string sim_ec = "block";
    double sim_sample = 0.05;
    sim->add_option("--n", sim_n, "pair count N")->capture_default_str();
    sim->add_option("--m", sim_m, "setting count M")->capture_default_str();
    sim->add_option("--delta", sim_delta, "sampling bias, number or 'auto' (= N^-1/4)")->capture_default_str();
    sim->add_option("--purity", sim_p, "EPR purity p")->capture_default_str();
    sim->add_option("--ec-margin", sim_margin, "error-correction rate margin over h(w)")->capture_default_str();
    sim->add_option("--ec", sim_ec, "error-correction scheme")->check(CLI::IsMember({"block", "ldpc"}));
    sim->add_option("--sample-fraction", sim_sample, "raw-key fraction sacrificed to estimate w")
        ->capture_default_str();

    // rates
    auto* rates = app.add_subcommand("rates", "asymptotic key-rate table over a purity grid");
    std::string rates_m = "3,4,6,11,100";
    std::string rates_grid = "0.9:1.0:0.001";
    rates->add_option("--m", rates_m, "comma-separated list of M values")->capture_default_str();
    rates->add_option("--p-grid", rates_grid, "purity grid A:B:STEP")->capture_default_str();

    // threshold
    auto* thr = app.add_subcommand("threshold", "minimal purity with positive rate for one M");
    int thr_m = 6;
    thr->add_option("--m", thr_m, "setting count M")->capture_default_str();

    // verify-lemmas
    auto* ver = app.add_subcommand("verify-lemmas", "brute-force/LP verification suites");
    std::string ver_suite = "all";
    ver->add_option("--suite", ver_suite, "which suite to run")
        ->check(CLI::IsMember({"all", "types", "symmetric", "estimation", "marginal", "monogamy",
                               "beta", "hash"}));

    // eve-lp
    auto* eve = app.add_subcommand("eve-lp", "LP adversary: optimal guessing probability");
    int eve_m = 2;
    std::string eve_box_file;
    std::string eve_preset = "epr0.9";
    int eve_x = 0;
    eve->add_option("--m", eve_m, "setting count M (presets)")->capture_default_str();
    eve->add_option("--box", eve_box_file, "box JSON file");
    eve->add_option("--preset", eve_preset, "pr | uniform | eprP (e.g. epr0.9) | randomK")->capture_default_str();
    eve->add_option("--x", eve_x, "Alice target setting")->capture_default_str();

    // hash-test
    auto* ht = app.add_subcommand("hash-test", "Toeplitz collision statistics");
    int ht_out = 8;
    int ht_in = 64;
    int ht_draws = 100000;
    ht->add_option("--in", ht_in, "input length")->capture_default_str();
    ht->add_option("--out-len", ht_out, "output length")->capture_default_str();
    ht->add_option("--draws", ht_draws, "hash draws per pair")->capture_default_str();

    // key-distance
    auto* kd = app.add_subcommand("key-distance", "exact key-vs-ideal distance on a tiny LP witness");
    int kd_m = 2;
    double kd_p = 0.9;
    int kd_x = 0;
    kd->add_option("--m", kd_m, "setting count M")->capture_default_str();
    kd->add_option("--purity", kd_p, "EPR purity of the Alice-Bob box")->capture_default_str();
    kd->add_option("--x", kd_x, "Alice target setting for Eve's attack")->capture_default_str();

    for (CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; })) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors -> 2; --help and friends -> 0
    }

    try {
        if (*sim) {
            nskd::ProtocolParams params;
            params.n = sim_n;
            params.m = sim_m;
            params.delta = sim_delta == "auto" ? nskd::auto_delta(sim_n) : std::stod(sim_delta);
            params.seed = seed;
            params.ec.margin = sim_margin;
            params.ec.scheme = sim_ec == "ldpc" ? nskd::EcConfig::Scheme::Ldpc
                                                : nskd::EcConfig::Scheme::Block;
            params.sample_fraction = sim_sample;
            nskd::BoxSource source(nskd::epr_box(sim_p, sim_m));
            nskd::Transcript t = nskd::run_protocol(params, source);
            json j = json::parse(t.to_json());
            j["config"] = config_echo("simulate", seed, format);
            j["config"]["purity"] = sim_p;
            j["config"]["delta"] = params.delta;
            j["config"]["ec"] = sim_ec;
            j["config"]["ecMargin"] = sim_margin;
            j["security"] = json::parse(
                nskd::security_report(t.n, t.n_r, t.n_e, t.n_c, t.b_est, t.m).to_json());
            emit(j.dump(2), out_file);
        } else if (*rates) {
            std::vector<nskd::RatePoint> rows;
            for (int m : parse_int_list(rates_m)) {
                auto part = nskd::rate_curve(m, parse_grid(rates_grid));
                rows.insert(rows.end(), part.begin(), part.end());
            }
            if (format == "csv") {
                emit(nskd::rate_curve_csv(rows), out_file);
            } else {
                json j;
                j["config"] = config_echo("rates", seed, format);
                j["config"]["m"] = rates_m;
                j["config"]["pGrid"] = rates_grid;
                json arr = json::array();
                for (const auto& r : rows)
                    arr.push_back({{"p", r.p},
                                   {"M", r.m},
                                   {"B", r.bc},
                                   {"w", r.w},
                                   {"rate_raw", r.rate_raw},
                                   {"rate_clamped", r.rate_clamped}});
                j["rows"] = arr;
                emit(j.dump(2), out_file);
            }
        } else if (*thr) {
            const double pmin = nskd::noise_threshold(thr_m);
            json j;
            j["config"] = config_echo("threshold", seed, format);
            j["config"]["m"] = thr_m;
            j["M"] = thr_m;
            j["p_min"] = pmin;
            j["rate_at_1"] = nskd::asymptotic_rate(nskd::expected_bc(1.0, thr_m), 0.0);
            emit(j.dump(2), out_file);
        } else if (*ver) {
            std::vector<nskd::CheckResult> checks;
            nskd::Rng master(seed);
            if (ver_suite == "all") {
                checks = nskd::verify_all(seed);
            } else if (ver_suite == "types") {
                checks.push_back(nskd::verify_type_mode());
            } else if (ver_suite == "symmetric") {
                checks.push_back(nskd::verify_symmetric_event_lift());
            } else if (ver_suite == "estimation") {
                checks.push_back(nskd::verify_estimation_confidence(master.stream(11).next_u64()));
            } else if (ver_suite == "marginal") {
                checks.push_back(nskd::verify_marginal_identity(master.stream(12).next_u64()));
            } else if (ver_suite == "monogamy") {
                checks.push_back(nskd::verify_monogamy(master.stream(13).next_u64()));
            } else if (ver_suite == "beta") {
                checks.push_back(nskd::verify_beta_monotonicity());
            } else if (ver_suite == "hash") {
                checks.push_back(nskd::verify_hash_two_universality(master.stream(14).next_u64(), 20000));
            }
            bool all = true;
            std::string text = "suite=" + ver_suite + " seed=" + std::to_string(seed) + "\n";
            for (const auto& c : checks) {
                all = all && c.pass;
                text += std::string(c.pass ? "PASS  " : "FAIL  ") + c.name + "  [" + c.detail + "]\n";
            }
            emit(text + (all ? "all suites passed" : "SUITE FAILURES PRESENT"), out_file);
            if (!all) return 1;
        } else if (*eve) {
            nskd::Rng rng(seed);
            std::unique_ptr<nskd::Box> box;
            if (!eve_box_file.empty()) {
                std::ifstream f(eve_box_file);
                if (!f) throw std::runtime_error("cannot open " + eve_box_file);
                std::stringstream ss;
                ss << f.rdbuf();
                box = std::make_unique<nskd::Box>(nskd::Box::from_json(ss.str()));
            } else if (eve_preset == "pr") {
                box = std::make_unique<nskd::Box>(nskd::pr_analog(eve_m, false));
            } else if (eve_preset == "uniform") {
                box = std::make_unique<nskd::Box>(nskd::uniform_box(eve_m, false));
            } else if (eve_preset.rfind("epr", 0) == 0) {
                box = std::make_unique<nskd::Box>(nskd::epr_box(std::stod(eve_preset.substr(3)), eve_m));
            } else if (eve_preset.rfind("random", 0) == 0) {
                nskd::Rng r2 = rng.stream(std::stoull(eve_preset.substr(6)));
                box = std::make_unique<nskd::Box>(nskd::random_ns_box(eve_m, r2, false));
            } else {
                throw CLI::ValidationError("unknown preset " + eve_preset);
            }
            nskd::GuessResult g = nskd::max_guessing(*box, eve_x);
            json j;
            j["config"] = config_echo("eve-lp", seed, format);
            j["config"]["m"] = box->settings();
            j["config"]["x"] = eve_x;
            j["config"]["source"] = eve_box_file.empty() ? eve_preset : eve_box_file;
            j["value"] = g.value;
            j["bc"] = g.bc;
            j["slack"] = g.slack;
            j["witness_ns_residual"] = g.witness.ns_residual();
            emit(j.dump(2), out_file);
        } else if (*ht) {
            nskd::Rng rng(seed);
            json pairs = json::array();
            const double q = std::exp2(-ht_out);
            for (int pi = 0; pi < 5; ++pi) {
                std::vector<std::uint8_t> a(static_cast<std::size_t>(ht_in)), b(static_cast<std::size_t>(ht_in));
                for (int i = 0; i < ht_in; ++i) {
                    a[static_cast<std::size_t>(i)] = rng.bernoulli(0.5);
                    b[static_cast<std::size_t>(i)] = rng.bernoulli(0.5);
                }
                if (a == b) b[0] ^= 1;
                int coll = 0;
                for (int d = 0; d < ht_draws; ++d) {
                    nskd::ToeplitzHash h = nskd::sample_hash(ht_in, ht_out, rng);
                    if (nskd::apply_hash(h, a) == nskd::apply_hash(h, b)) ++coll;
                }
                pairs.push_back({{"collisions", coll},
                                 {"rate", static_cast<double>(coll) / ht_draws},
                                 {"expected", q}});
            }
            json j;
            j["config"] = config_echo("hash-test", seed, format);
            j["inLen"] = ht_in;
            j["outLen"] = ht_out;
            j["draws"] = ht_draws;
            j["pairs"] = pairs;
            emit(j.dump(2), out_file);
        } else if (*kd) {
            nskd::GuessResult g = nskd::max_guessing(nskd::epr_box(kd_p, kd_m), kd_x);
            // f publishes the raw bit's parity with nothing: one-bit identity
            std::vector<int> f{0, 1};
            nskd::KeyTable table = nskd::tripartite_key_table(g.witness, f, 1, 1);
            const double dist = nskd::key_distance_exact(table);
            const double bound = nskd::pa_bound(1, 1, 1, g.bc);
            json j;
            j["config"] = config_echo("key-distance", seed, format);
            j["config"]["m"] = kd_m;
            j["config"]["purity"] = kd_p;
            j["config"]["x"] = kd_x;
            j["distance"] = dist;
            j["pa_bound"] = bound;
            j["bc"] = g.bc;
            j["guessing"] = g.value;
            emit(j.dump(2), out_file);
        }
    } catch (const nskd::ProtocolAbort& e) {
        std::cerr << "protocol abort: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
