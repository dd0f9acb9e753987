#include <gtest/gtest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string &args, const std::string &env = "") {
    const std::string cmd = env + " " + SIQSIM_PATH + " " + args + " 2>/dev/null";
    FILE *pipe = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 512> buf;
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path fresh_dir(const std::string &name) {
    const auto d = fs::temp_directory_path() / ("siqsim_test_" + name);
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

double field(const std::string &line, const std::string &key) {
    const auto pos = line.find(key + "=");
    if (pos == std::string::npos) return std::nan("");
    return std::stod(line.substr(pos + key.size() + 1));
}

}  // namespace

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("rabi --bogus 1").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, ConfigErrorWritesNothing) {
    const auto d = fresh_dir("badcfg");
    fs::create_directories(d);
    const auto cfg = d / "device.cfg";
    std::ofstream(cfg) << "E_Z = 14e9\nthis is not a key value line\n";
    const auto out = d / "out";
    EXPECT_EQ(run("--device " + cfg.string() + " --out " + out.string() + " rabi").code, 3);
    EXPECT_FALSE(fs::exists(out));
    std::ofstream(cfg) << "E_Z = -14e9\n";
    EXPECT_EQ(run("--device " + cfg.string() + " --out " + out.string() + " rabi").code, 3);
    EXPECT_EQ(run("--out " + out.string() + " --set nonsense=1 rabi").code, 3);
    EXPECT_EQ(run("--out " + out.string() + " rabi --target Q").code, 3);
    EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, OutOfRange) {
    const auto d = fresh_dir("range");
    EXPECT_EQ(run("--out " + d.string() + " spectroscopy --vm 0.5").code, 4);
    EXPECT_EQ(run("--out " + d.string() + " bell-tomo --vl 1.5").code, 4);
    EXPECT_FALSE(fs::exists(d / "spectroscopy.csv"));
}

TEST(Cli, RabiSummaryAndFiles) {
    const auto d = fresh_dir("rabi");
    const auto r = run("--out " + d.string() + " rabi");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NEAR(field(r.out, "rabi_frequency_fit") / 4.8e6, 1.0, 0.01);
    const auto csv = slurp(d / "rabi.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "drive_frequency [Hz],burst_time [s],p_up");
    const auto meta = nlohmann::json::parse(slurp(d / "rabi.meta.json"));
    EXPECT_TRUE(meta.contains("device"));
    EXPECT_EQ(meta.at("seed").get<std::uint64_t>(), 20180126u);
}

TEST(Cli, CnotCalControlDownIsFlat) {
    const auto d = fresh_dir("cnot");
    const auto r = run("--out " + d.string() + " cnot-cal --input dd");
    ASSERT_EQ(r.code, 0);
    EXPECT_LT(field(r.out, "max_p_up_left"), 0.05);
    const auto up = run("--out " + d.string() + " cnot-cal --input du");
    EXPECT_NEAR(field(up.out, "pi_time_left"), 130e-9, 2e-9);
}

TEST(Cli, BellTomography) {
    const auto d = fresh_dir("bell");
    const auto r = run("--out " + d.string() + " bell-tomo --vl 0.76 --vr 0.70");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(field(r.out, "fidelity_raw"), 0.805, 0.01);
    const auto csv = slurp(d / "bell-tomo.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
}

TEST(Cli, DeterministicOutputAndEnvDirectory) {
    const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
    ASSERT_EQ(run("--seed 5 ramsey --samples 50 --n 21", "SIQSIM_OUT=" + a.string()).code, 0);
    ASSERT_EQ(run("--seed 5 --out " + b.string() + " ramsey --samples 50 --n 21").code, 0);
    EXPECT_EQ(slurp(a / "ramsey.csv"), slurp(b / "ramsey.csv"));
    EXPECT_FALSE(slurp(a / "ramsey.csv").empty());
    const auto c = fresh_dir("det_c");
    ASSERT_EQ(run("--seed 6 --out " + c.string() + " ramsey --samples 50 --n 21").code, 0);
    EXPECT_NE(slurp(a / "ramsey.csv"), slurp(c / "ramsey.csv"));
}

TEST(Cli, OverridesReachTheModel) {
    const auto d = fresh_dir("override");
    ASSERT_EQ(run("--out " + d.string() + " --set rabi_frequency=2e6 rabi --t-max 2e-6").code, 0);
    const auto meta = nlohmann::json::parse(slurp(d / "rabi.meta.json"));
    EXPECT_NEAR(meta.at("summary").at("rabi_frequency_fit").get<double>() / 2e6, 1.0, 0.01);
}

TEST(Cli, EverySubcommandRuns) {
    const auto d = fresh_dir("all");
    for (const std::string c : {"echo --n 5 --samples 10", "spectroscopy --n-tau 5 --n-freq 51", "exchange-fit",
                                "echo-phase --n 11", "cnot-scan --n 9", "rb --lengths 1,10,50 --sequences 4",
                                "readout-sim --traces 500"}) {
        const auto r = run("--out " + d.string() + " " + c);
        EXPECT_EQ(r.code, 0) << c;
        const std::string name = c.substr(0, c.find(' '));
        EXPECT_TRUE(fs::exists(d / (name + ".csv"))) << name;
        EXPECT_TRUE(fs::exists(d / (name + ".meta.json"))) << name;
    }
}

TEST(Cli, ExchangeFitFromFile) {
    const auto d = fresh_dir("fitfile");
    fs::create_directories(d);
    // Synthetic output, read back as input.
    ASSERT_EQ(run("--out " + d.string() + " exchange-fit --n 41").code, 0);
    fs::rename(d / "exchange-fit.csv", d / "j.csv");
    const auto r = run("--out " + d.string() + " exchange-fit --input " + (d / "j.csv").string());
    EXPECT_EQ(r.code, 0) << r.out;
    const auto meta = nlohmann::json::parse(slurp(d / "exchange-fit.meta.json"));
    EXPECT_NEAR(meta.at("summary").at("V_M0").get<double>() / 0.420, 1.0, 0.05);
    // Six hand-picked points admit no finite optimum; that is a fit failure, not a crash.
    std::ofstream(d / "few.csv") << "V_M,J\n0.380,6.0e4\n0.390,3.0e5\n0.395,7.0e5\n0.400,1.5e6\n0.405,3.6e6\n0.410,1.0e7\n";
    EXPECT_EQ(run("--out " + d.string() + " exchange-fit --input " + (d / "few.csv").string()).code, 1);
    std::ofstream(d / "bad.csv") << "V_M,J\n0.38;x\n";
    EXPECT_EQ(run("--out " + d.string() + " exchange-fit --input " + (d / "bad.csv").string()).code, 3);
}
