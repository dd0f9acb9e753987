#include "siq/config.hpp"
#include "siq/pulse_io.hpp"
#include "siq/result.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace siq;

TEST(Config, ParseCommentsAndErrors) {
    const auto c = KeyValueConfig::parse("# header\nE_Z = 14e9  # trailing\n\n dE_Z=2e8\n");
    EXPECT_EQ(c.get_double("E_Z").value(), 14e9);
    EXPECT_EQ(c.get_double("dE_Z", 0), 2e8);
    EXPECT_FALSE(c.get("T1").has_value());
    EXPECT_EQ(c.get_double("T1", 5.0), 5.0);
    EXPECT_THROW(KeyValueConfig::parse("a = 1\na = 2\n"), ConfigError);
    EXPECT_THROW(KeyValueConfig::parse("just words\n"), ConfigError);
    EXPECT_THROW(KeyValueConfig::parse("a = 1x\n").get_double("a"), ConfigError);
    EXPECT_THROW(KeyValueConfig::parse("a = nan\n").get_double("a"), ConfigError);
    EXPECT_THROW(KeyValueConfig::parse("a = 1\nb = 2\n").require_known({"a"}), ConfigError);
    EXPECT_THROW(KeyValueConfig::load("/nonexistent/device.cfg"), ConfigError);
}

TEST(PulseIo, Roundtrip) {
    PulseSequence s;
    Vector4c v(cplx(0.5, 0), cplx(0, 0.5), cplx(-0.5, 0), cplx(0, -0.5));
    s.initial_state = TwoQubitState(v);
    s.add(MicrowaveBurst{Qubit::Left, 104e-9, 13.9e9, 4.8e6, -1.5707963267948966});
    s.add(DcExchange{204e-9, 4.902e6, std::nullopt});
    s.add(DcExchange{10e-9, std::nullopt, 0.41});
    s.add(CompositeSegment{176e-9, MicrowaveBurst{Qubit::Right, 0, 14.1e9, 2.8e6, 0.1}, 4.9e6});
    s.add(CompositeSegment{5e-9, std::nullopt, 1e6});
    s.add(Idle{1e-6});
    s.add(VirtualZ{Qubit::Right, 0.25});
    const auto text = format_pulse_sequence(s);
    const auto t = parse_pulse_sequence(text);
    EXPECT_EQ(format_pulse_sequence(t), text);
    EXPECT_EQ(t.segments.size(), s.segments.size());
    EXPECT_LT((t.initial_state.amplitudes() - v).norm(), 1e-15);
}

TEST(PulseIo, Errors) {
    EXPECT_THROW(parse_pulse_sequence("burst target=Q duration=1e-9 freq=1 rabi=1 phase=0\n"), ConfigError);
    EXPECT_THROW(parse_pulse_sequence("wiggle duration=1\n"), ConfigError);
    EXPECT_THROW(parse_pulse_sequence("idle\n"), ConfigError);
    EXPECT_THROW(parse_pulse_sequence("idle duration=-1\n"), ConfigError);
    EXPECT_THROW(parse_pulse_sequence("exchange duration=1e-9 J=1 V_M=0.4\n"), ConfigError);
    try {
        parse_pulse_sequence("idle duration=1e-9\n\nvz target=L\n");
        FAIL();
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
    }
    const auto s = parse_pulse_sequence("# comment\ninit state=ud\nidle duration=2e-9 # trailing\n");
    EXPECT_NEAR(s.initial_state.populations()[1], 1.0, 1e-15);
}

TEST(Result, CsvAndSidecar) {
    ExperimentResult r("demo", {{"x", "s", {0.0, 1e-6}}, {"f", "Hz", {1.0, 2.0, 3.0}}});
    r.add_column("p", "", {0, 0.1, 0.2, 0.3, 0.4, 1.0 + 1e-12}, true);
    EXPECT_EQ(r.n_points(), 6u);
    EXPECT_DOUBLE_EQ(r.at("p", 1, 2), 1.0);
    EXPECT_DOUBLE_EQ(r.at("p", 0, 1), 0.1);
    const auto csv = r.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "x [s],f [Hz],p");
    EXPECT_THROW(r.add_column("q", "", {0, 0, 0, 0, 0, 1.1}, true), std::invalid_argument);
    EXPECT_THROW(r.add_column("q", "", {0, 0}, false), std::invalid_argument);
    EXPECT_THROW(r.column("nope"), std::out_of_range);
    r.set_summary("k", 2.5);
    r.add_warning("w");
    const auto dir = std::filesystem::temp_directory_path() / "siq_result_test";
    std::filesystem::remove_all(dir);
    r.write(dir.string(), "demo");
    std::ifstream f(dir / "demo.meta.json");
    const auto j = nlohmann::json::parse(f);
    EXPECT_EQ(j.at("summary").at("k").get<double>(), 2.5);
    EXPECT_EQ(j.at("warnings").size(), 1u);
    EXPECT_TRUE(std::filesystem::exists(dir / "demo.csv"));
    EXPECT_THROW(ExperimentResult("bad", {}), std::invalid_argument);
}
