#include <cmath>
#include <sstream>

#include "doctest.h"
#include "optrace/analytic.hpp"
#include "optrace/error.hpp"
#include "optrace/io.hpp"

using namespace optrace;

TEST_CASE("doubles round-trip through text") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0, 4.9e-324}) {
        CHECK(parse_double(format_double(x)) == x);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK_THROWS_AS(parse_double("1.5x"), ValidationError);
    CHECK_THROWS_AS(parse_double(""), ValidationError);
}

TEST_CASE("curves round-trip through CSV exactly") {
    const auto g = open_grid(101);
    std::vector<DensityCurve> cs{analytic::european_curve(EffectiveMaturity(0.25), CorrelationScale::independent(), g),
                                 analytic::european_curve(EffectiveMaturity(0.7), CorrelationScale::independent(), g)};
    std::stringstream ss;
    write_csv(ss, curves_to_csv(cs, {{"version", "test"}}));
    const std::string text = ss.str();
    CHECK(text.rfind("# version=test\n", 0) == 0);
    CHECK(text.find("w,density_1,density_2\n") != std::string::npos);
    const auto back = curves_from_csv(read_csv(ss));
    REQUIRE(back.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(back[k].grid() == cs[k].grid());
        CHECK(back[k].values() == cs[k].values());
        CHECK(back[k].meta().get("alpha") == cs[k].meta().get("alpha"));
    }
}

TEST_CASE("CSV reader rejects malformed input") {
    std::stringstream ragged("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(ragged), ValidationError);
    std::stringstream empty("# only=header\n");
    CHECK_THROWS_AS(read_csv(empty), ValidationError);
    std::stringstream ok("a,b\n1,2\n");
    CHECK_THROWS_AS(read_csv(ok).column("c"), ValidationError);
}

TEST_CASE("SVG output") {
    PlotSpec p;
    p.title = "a < b";
    p.log_y = true;
    p.series.push_back({"s", {0.1, 0.5, 0.9}, {1.0, 10.0, 100.0}, false});
    std::stringstream ss;
    write_svg(ss, p);
    const auto s = ss.str();
    CHECK(s.find("<svg") != std::string::npos);
    CHECK(s.find("<polyline") != std::string::npos);
    CHECK(s.find("a &lt; b") != std::string::npos);

    GridPlotSpec g;
    g.row_ticks = {"-1", "2"};
    g.col_ticks = {"0"};
    g.cell_text = {{"transition"}, {"no_transition"}};
    g.cell_class = {{1}, {0}};
    std::stringstream gs;
    write_grid_svg(gs, g);
    CHECK(gs.str().find("no_transition") != std::string::npos);
}
