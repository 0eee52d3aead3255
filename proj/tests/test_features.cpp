#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "oracles.hpp"
#include "spidet/features.hpp"
#include "spidet/synthgen.hpp"
#include "test_util.hpp"

using namespace spidet;

namespace {

// small board: 3 components, 6 pins per board
BoardLayout tiny_layout() {
    return BoardLayout{{{"CA", 2}, {"CB", 3}, {"CC", 1}}, 2};
}

GeneratorConfig tiny_config(std::uint64_t seed, std::int64_t panels, double defect_rate,
                            double missing_rate) {
    GeneratorConfig config;
    config.seed = seed;
    config.num_panels = panels;
    config.layout = tiny_layout();
    config.pin_defect_rate = defect_rate;
    config.operator_bad_rate = 0.5;
    config.not_repairable_rate = 0.6;
    config.missing_pin_number_rate = missing_rate;
    return config;
}

}  // namespace

TEST_SUITE_BEGIN("features");

TEST_CASE("pin table mirrors the per-pin encoding") {
    GeneratorConfig config = tiny_config(1, 2, 0.1, 0.0);
    SyntheticData data = generate(config);
    EncodingConfig encoding;
    FeatureTable table = build_pin_table(data.pins, encoding);
    CHECK(table.level == Level::Pin);
    CHECK(table.rows() == data.pins.size());
    CHECK(table.cols() == 17);
    CHECK(table.column_names == per_pin_feature_names(encoding));
    CHECK(table.row_keys[0].pin_number == data.pins[0].key.pin_number);
    table.validate();

    CHECK_THROWS_AS(build_pin_table({}, encoding), DataError);
}

TEST_CASE("component pivot concatenates pins in ascending order") {
    GeneratorConfig config = tiny_config(2, 3, 0.0, 0.0);
    SyntheticData data = generate(config);
    EncodingConfig encoding;

    FeatureTable table = build_component_table(data.pins, "CA", tiny_layout(), encoding);
    CHECK(table.level == Level::Component);
    CHECK(table.rows() == 6);  // 3 panels x 2 figures
    CHECK(table.cols() == 2 * 17);
    CHECK(table.column_names[0] == "Volume(%)@pin1");
    CHECK(table.column_names[17] == "Volume(%)@pin2");

    // pivoted values match the source records
    std::map<std::pair<BoardKey, int>, const PinRecord*> source;
    for (const auto& rec : data.pins) {
        if (rec.key.component_id == "CA") {
            source[{board_of(rec.key), rec.key.pin_number}] = &rec;
        }
    }
    for (std::size_t r = 0; r < table.rows(); ++r) {
        BoardKey board = table.row_keys[r].board_key();
        CHECK(table.at(r, 0) == source[{board, 1}]->volume_pct);
        CHECK(table.at(r, 17) == source[{board, 2}]->volume_pct);
    }
}

TEST_CASE("component pivot width scales with the pin count") {
    // 2-pin component -> 34 columns; a 49-pin component -> 833 columns
    BoardLayout layout{{{"BIG", 49}}, 1};
    GeneratorConfig config;
    config.seed = 3;
    config.num_panels = 1;
    config.layout = layout;
    config.pin_defect_rate = 0;
    SyntheticData data = generate(config);
    EncodingConfig encoding;
    FeatureTable table = build_component_table(data.pins, "BIG", layout, encoding);
    CHECK(table.cols() == 49 * 17);
    CHECK(table.rows() == 1);
}

TEST_CASE("missing or duplicate pins are structural errors naming the board") {
    GeneratorConfig config = tiny_config(4, 1, 0.0, 0.0);
    SyntheticData data = generate(config);
    EncodingConfig encoding;

    std::vector<PinRecord> missing = data.pins;
    auto it = std::find_if(missing.begin(), missing.end(), [](const PinRecord& r) {
        return r.key == PinKey{1, 2, "CB", 3};
    });
    REQUIRE(it != missing.end());
    missing.erase(it);
    try {
        build_component_table(missing, "CB", tiny_layout(), encoding);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string what = e.what();
        CHECK(what.find("CB") != std::string::npos);
        CHECK(what.find("figure 2") != std::string::npos);
    }

    std::vector<PinRecord> duplicated = data.pins;
    duplicated.push_back(duplicated.front());
    CHECK_THROWS_AS(
        build_component_table(duplicated, duplicated.front().key.component_id, tiny_layout(),
                              encoding),
        DataError);

    CHECK_THROWS_AS(build_component_table(data.pins, "NOPE", tiny_layout(), encoding), DataError);
}

TEST_CASE("board table concatenates component blocks in layout order") {
    GeneratorConfig config = tiny_config(5, 2, 0.0, 0.0);
    SyntheticData data = generate(config);
    EncodingConfig encoding;
    FeatureTable board = build_board_table(data.pins, tiny_layout(), encoding);
    CHECK(board.level == Level::Board);
    CHECK(board.rows() == 4);
    CHECK(board.cols() == 6u * 17u);  // total pins x per-pin width
    CHECK(board.column_names.front() == "CA/Volume(%)@pin1");
    CHECK(board.column_names.back().rfind("CC/", 0) == 0);

    // width identity: sum of component widths
    std::size_t total = 0;
    for (const auto& comp : tiny_layout().components) {
        total += build_component_table(data.pins, comp.id, tiny_layout(), encoding).cols();
    }
    CHECK(board.cols() == total);

    // single-board input
    std::vector<PinRecord> one_board;
    for (const auto& rec : data.pins) {
        if (board_of(rec.key) == BoardKey{1, 1}) one_board.push_back(rec);
    }
    BoardLayout one = tiny_layout();
    one.figures_per_panel = 1;
    FeatureTable single = build_board_table(one_board, one, encoding);
    CHECK(single.rows() == 1);
}

TEST_CASE("combined component table stacks zero-padded pivots") {
    GeneratorConfig config = tiny_config(6, 2, 0.0, 0.0);
    SyntheticData data = generate(config);
    EncodingConfig encoding;
    FeatureTable combined = build_combined_component_table(data.pins, tiny_layout(), encoding);
    CHECK(combined.level == Level::Component);
    CHECK(combined.rows() == 4u * 3u);  // boards x components
    CHECK(combined.cols() == 3u * 17u);  // max pin count is 3
    // the 1-pin component leaves pins 2..3 zeroed
    for (std::size_t r = 0; r < combined.rows(); ++r) {
        if (combined.row_keys[r].component_id == "CC") {
            for (std::size_t c = 17; c < combined.cols(); ++c) CHECK(combined.at(r, c) == 0.0);
        }
    }
}

TEST_CASE("c1 left join marks targets per level") {
    GeneratorConfig config = tiny_config(7, 2, 0.0, 0.0);
    SyntheticData data = generate(config);
    EncodingConfig encoding;

    std::vector<AoiRecord> aoi;
    AoiRecord with_pin;
    with_pin.panel_id = 1;
    with_pin.figure_id = 1;
    with_pin.component_id = "CA";
    with_pin.pin_number = 2;
    with_pin.machine_label = "misaligned";
    aoi.push_back(with_pin);

    AoiRecord without_pin;
    without_pin.panel_id = 2;
    without_pin.figure_id = 2;
    without_pin.component_id = "CB";
    without_pin.machine_label = "translated";
    aoi.push_back(without_pin);

    FeatureTable pin_table = attach_labels_c1(build_pin_table(data.pins, encoding), aoi);
    std::int64_t positives = 0;
    for (std::size_t r = 0; r < pin_table.rows(); ++r) {
        if ((*pin_table.target)[r]) {
            ++positives;
            CHECK(pin_table.row_keys[r] == RowKey{1, 1, "CA", 2});
        }
    }
    CHECK(positives == 1);  // the pinless AOI row marks nothing at pin level

    JoinStats stats;
    FeatureTable comp_table = attach_labels_c1(
        build_component_table(data.pins, "CB", tiny_layout(), encoding), aoi, "", &stats);
    positives = 0;
    for (std::size_t r = 0; r < comp_table.rows(); ++r) {
        if ((*comp_table.target)[r]) {
            ++positives;
            CHECK(comp_table.row_keys[r].board_key() == BoardKey{2, 2});
        }
    }
    CHECK(positives == 1);  // pin number is not needed at component level

    // board level needs a target component
    FeatureTable board = build_board_table(data.pins, tiny_layout(), encoding);
    CHECK_THROWS_AS(attach_labels_c1(board, aoi), UsageError);
    FeatureTable board_cb = attach_labels_c1(board, aoi, "CB");
    positives = 0;
    for (std::size_t r = 0; r < board_cb.rows(); ++r) positives += (*board_cb.target)[r];
    CHECK(positives == 1);

    // empty AOI: all zeros
    FeatureTable empty = attach_labels_c1(pin_table, {});
    for (std::uint8_t t : *empty.target) CHECK(t == 0);
}

TEST_CASE("c2 inner join appends the fault one-hot and takes max aggregates") {
    GeneratorConfig config = tiny_config(8, 1, 0.0, 0.0);
    SyntheticData data = generate(config);
    EncodingConfig encoding;

    std::vector<AoiRecord> aoi;
    AoiRecord a;
    a.panel_id = 1;
    a.figure_id = 1;
    a.component_id = "CB";
    a.pin_number = 1;
    a.machine_label = "lean soldering";
    a.operator_label = OperatorLabel::Good;
    aoi.push_back(a);
    AoiRecord b = a;
    b.pin_number = 3;
    b.machine_label = "misaligned";
    b.operator_label = OperatorLabel::Bad;
    b.repair_label = RepairLabel::FalseScrap;
    aoi.push_back(b);

    FeatureTable comp = attach_labels_c2(
        build_component_table(data.pins, "CB", tiny_layout(), encoding), aoi, encoding);
    REQUIRE(comp.rows() == 1);  // inner join keeps only the matched board
    CHECK((*comp.target)[0] == 1);  // one Bad among the two faults
    // multi-hot: both fault tokens set
    auto col = [&](const std::string& name) {
        for (std::size_t c = 0; c < comp.cols(); ++c) {
            if (comp.column_names[c] == name) return comp.at(0, c);
        }
        FAIL("column not found: ", name);
        return 0.0;
    };
    CHECK(col("AoiLabel=lean soldering") == 1.0);
    CHECK(col("AoiLabel=misaligned") == 1.0);
    CHECK(col("AoiLabel=translated") == 0.0);

    // pin level: only rows with pin-keyed AOI matches survive
    FeatureTable pin = attach_labels_c2(build_pin_table(data.pins, encoding), aoi, encoding);
    REQUIRE(pin.rows() == 2);
    CHECK((*pin.target)[0] == 0);  // pin 1, Good
    CHECK((*pin.target)[1] == 1);  // pin 3, Bad
}

TEST_CASE("c3 keeps operator-bad rows and maps repair labels") {
    GeneratorConfig config = tiny_config(9, 1, 0.0, 0.0);
    SyntheticData data = generate(config);
    EncodingConfig encoding;

    std::vector<AoiRecord> aoi;
    AoiRecord good;
    good.panel_id = 1;
    good.figure_id = 1;
    good.component_id = "CA";
    good.pin_number = 1;
    good.machine_label = "other";
    good.operator_label = OperatorLabel::Good;
    aoi.push_back(good);

    AoiRecord scrap = good;
    scrap.figure_id = 2;
    scrap.operator_label = OperatorLabel::Bad;
    scrap.repair_label = RepairLabel::FalseScrap;
    aoi.push_back(scrap);

    AoiRecord npr = good;
    npr.component_id = "CC";
    npr.operator_label = OperatorLabel::Bad;
    npr.repair_label = RepairLabel::NotPossibleToRepair;
    aoi.push_back(npr);

    AoiRecord no_repair = good;
    no_repair.component_id = "CB";
    no_repair.operator_label = OperatorLabel::Bad;  // missing repair label
    aoi.push_back(no_repair);

    JoinStats stats;
    FeatureTable pin =
        attach_labels_c3(build_pin_table(data.pins, encoding), aoi, encoding, "", &stats);
    REQUIRE(pin.rows() == 2);  // good row excluded, no-repair row dropped
    CHECK(stats.bad_without_repair_dropped == 1);
    std::map<std::string, std::uint8_t> by_component;
    for (std::size_t r = 0; r < pin.rows(); ++r) {
        by_component[pin.row_keys[r].component_id] = (*pin.target)[r];
    }
    CHECK(by_component["CA"] == 0);  // FalseScrap
    CHECK(by_component["CC"] == 1);  // NotPossibleToRepair
    // operator label is carried as a constant feature on the filtered rows
    CHECK(pin.column_names.back() == "OperatorLabel");
    CHECK(pin.at(0, pin.cols() - 1) == 1.0);
}

TEST_CASE("join targets equal the brute-force oracle on random instances") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GeneratorConfig config = tiny_config(seed * 11, 3, 0.15, 0.05);  // up to 6 boards
        SyntheticData data = generate(config);
        EncodingConfig encoding;

        FeatureTable pin = build_pin_table(data.pins, encoding);
        FeatureTable ca = build_component_table(data.pins, "CA", tiny_layout(), encoding);
        FeatureTable combined = build_combined_component_table(data.pins, tiny_layout(), encoding);
        FeatureTable board = build_board_table(data.pins, tiny_layout(), encoding);

        for (const FeatureTable* base : {&pin, &ca, &combined}) {
            FeatureTable c1 = attach_labels_c1(*base, data.aoi);
            CHECK(*c1.target == oracles::brute_force_c1(*base, data.aoi, ""));

            FeatureTable c2 = attach_labels_c2(*base, data.aoi, encoding);
            auto oracle2 = oracles::brute_force_c2(*base, data.aoi, "");
            REQUIRE(c2.rows() == oracle2.kept.size());
            CHECK(*c2.target == oracle2.target);
            for (std::size_t i = 0; i < oracle2.kept.size(); ++i) {
                CHECK(c2.row_keys[i] == base->row_keys[oracle2.kept[i]]);
            }

            FeatureTable c3 = attach_labels_c3(*base, data.aoi, encoding);
            auto oracle3 = oracles::brute_force_c3(*base, data.aoi, "");
            REQUIRE(c3.rows() == oracle3.kept.size());
            CHECK(*c3.target == oracle3.target);
        }

        FeatureTable board_c1 = attach_labels_c1(board, data.aoi, "CB");
        CHECK(*board_c1.target == oracles::brute_force_c1(board, data.aoi, "CB"));

        FeatureTable board_c2 = attach_labels_c2(board, data.aoi, encoding, "CB");
        auto oracle_b2 = oracles::brute_force_c2(board, data.aoi, "CB");
        REQUIRE(board_c2.rows() == oracle_b2.kept.size());
        CHECK(*board_c2.target == oracle_b2.target);

        FeatureTable board_c3 = attach_labels_c3(board, data.aoi, encoding, "CB");
        auto oracle_b3 = oracles::brute_force_c3(board, data.aoi, "CB");
        REQUIRE(board_c3.rows() == oracle_b3.kept.size());
        CHECK(*board_c3.target == oracle_b3.target);
    }
}

TEST_CASE("c1 pin positives imply component positives") {
    GeneratorConfig config = tiny_config(31, 6, 0.1, 0.0);  // all pin numbers present
    SyntheticData data = generate(config);
    EncodingConfig encoding;

    FeatureTable pin = attach_labels_c1(build_pin_table(data.pins, encoding), data.aoi);
    FeatureTable combined =
        attach_labels_c1(build_combined_component_table(data.pins, tiny_layout(), encoding),
                         data.aoi);
    std::map<ComponentKey, std::uint8_t> component_target;
    for (std::size_t r = 0; r < combined.rows(); ++r) {
        component_target[combined.row_keys[r].component_key()] = (*combined.target)[r];
    }
    for (std::size_t r = 0; r < pin.rows(); ++r) {
        if ((*pin.target)[r]) {
            CHECK(component_target[pin.row_keys[r].component_key()] == 1);
        }
    }
}

TEST_CASE("cascade filtration when every pin number is present") {
    GeneratorConfig config = tiny_config(33, 6, 0.2, 0.0);
    config.operator_bad_rate = 0.6;
    SyntheticData data = generate(config);
    EncodingConfig encoding;
    FeatureTable pin = build_pin_table(data.pins, encoding);

    FeatureTable c1 = attach_labels_c1(pin, data.aoi);
    FeatureTable c2 = attach_labels_c2(pin, data.aoi, encoding);
    FeatureTable c3 = attach_labels_c3(pin, data.aoi, encoding);

    std::set<RowKey> c1_pos;
    for (std::size_t r = 0; r < c1.rows(); ++r) {
        if ((*c1.target)[r]) c1_pos.insert(c1.row_keys[r]);
    }
    std::set<RowKey> c2_rows(c2.row_keys.begin(), c2.row_keys.end());
    std::set<RowKey> c2_pos;
    for (std::size_t r = 0; r < c2.rows(); ++r) {
        if ((*c2.target)[r]) c2_pos.insert(c2.row_keys[r]);
    }
    for (const auto& key : c2_rows) CHECK(c1_pos.count(key) == 1);
    for (const auto& key : c3.row_keys) CHECK(c2_pos.count(key) == 1);
}

TEST_CASE("kfold fold sizes and stratification") {
    EncodingConfig encoding;

    auto make_pin_table = [&](std::size_t rows, std::size_t positives) {
        FeatureTable t;
        t.level = Level::Pin;
        t.column_names = {"x"};
        t.target = std::vector<std::uint8_t>();
        for (std::size_t i = 0; i < rows; ++i) {
            t.values.push_back(static_cast<double>(i));
            t.row_keys.push_back(RowKey{static_cast<std::int64_t>(i + 1), 1, "C", 1});
            t.target->push_back(i < positives ? 1 : 0);
        }
        return t;
    };

    SUBCASE("15387 rows split 5 ways") {
        FeatureTable t = make_pin_table(15387, 200);
        auto folds = kfold_split(t, 5, 1, false);
        std::multiset<std::size_t> sizes;
        std::set<std::size_t> seen;
        for (const auto& fold : folds) {
            sizes.insert(fold.test.size());
            for (std::size_t i : fold.test) CHECK(seen.insert(i).second);
            CHECK(fold.train.size() + fold.test.size() == 15387);
        }
        CHECK(seen.size() == 15387);
        CHECK(sizes == std::multiset<std::size_t>{3077, 3077, 3077, 3078, 3078});
    }

    SUBCASE("10 rows, 5 folds of 2") {
        FeatureTable t = make_pin_table(10, 5);
        for (const auto& fold : kfold_split(t, 5, 3, false)) CHECK(fold.test.size() == 2);
    }

    SUBCASE("stratified keeps positives balanced") {
        FeatureTable t = make_pin_table(100, 10);
        for (const auto& fold : kfold_split(t, 5, 9, true)) {
            std::size_t pos = 0;
            for (std::size_t i : fold.test) pos += (*t.target)[i];
            CHECK(pos == 2);
            CHECK(fold.test.size() == 20);
        }
    }

    SUBCASE("stratified with too few positives advises unstratified") {
        FeatureTable t = make_pin_table(100, 3);
        CHECK_THROWS_WITH_AS(kfold_split(t, 5, 1, true), doctest::Contains("unstratified"),
                             DataError);
    }

    SUBCASE("k bounds") {
        FeatureTable t = make_pin_table(10, 5);
        CHECK_THROWS_AS(kfold_split(t, 1, 1, false), UsageError);
        CHECK_THROWS_AS(kfold_split(t, 11, 1, false), UsageError);
    }

    SUBCASE("same seed reproduces the split") {
        FeatureTable t = make_pin_table(64, 16);
        auto a = kfold_split(t, 4, 17, true);
        auto b = kfold_split(t, 4, 17, true);
        for (std::size_t f = 0; f < a.size(); ++f) {
            CHECK(a[f].test == b[f].test);
            CHECK(a[f].train == b[f].train);
        }
    }
}

TEST_CASE("kfold keeps boards intact at component level") {
    GeneratorConfig config = tiny_config(13, 10, 0.1, 0.0);
    SyntheticData data = generate(config);
    EncodingConfig encoding;
    FeatureTable combined =
        attach_labels_c1(build_combined_component_table(data.pins, tiny_layout(), encoding),
                         data.aoi);
    auto folds = kfold_split(combined, 4, 5, false);
    for (const auto& fold : folds) {
        std::set<BoardKey> test_boards, train_boards;
        for (std::size_t i : fold.test) test_boards.insert(combined.row_keys[i].board_key());
        for (std::size_t i : fold.train) train_boards.insert(combined.row_keys[i].board_key());
        for (const auto& board : test_boards) CHECK(train_boards.count(board) == 0);
    }
}

TEST_CASE("subset and column selection") {
    GeneratorConfig config = tiny_config(14, 1, 0.0, 0.0);
    SyntheticData data = generate(config);
    EncodingConfig encoding;
    FeatureTable t = build_pin_table(data.pins, encoding);

    FeatureTable sub = subset_rows(t, {0, 2, 4});
    CHECK(sub.rows() == 3);
    CHECK(sub.row_keys[1] == t.row_keys[2]);
    CHECK(sub.row(1)[0] == t.at(2, 0));

    FeatureTable cols = select_columns(t, {"PadType", "Volume(%)"});
    CHECK(cols.cols() == 2);
    CHECK(cols.column_names[0] == "Volume(%)");  // original order preserved
    CHECK(cols.column_names[1] == "PadType");
    CHECK_THROWS_AS(select_columns(t, {"NotAColumn"}), DataError);
}

TEST_CASE("feature table csv export carries keys and target") {
    GeneratorConfig config = tiny_config(15, 1, 0.2, 0.0);
    SyntheticData data = generate(config);
    EncodingConfig encoding;
    FeatureTable t = attach_labels_c1(build_pin_table(data.pins, encoding), data.aoi);

    testutil::TempDir tmp("ftcsv");
    write_feature_table_csv(t, tmp.file("table.csv"));
    std::string text = testutil::read_file(tmp.file("table.csv"));
    CHECK(text.rfind("__key_panel,__key_figure,__key_component,__key_pin,Volume(%)", 0) == 0);
    CHECK(text.find("__target__") != std::string::npos);
}

TEST_SUITE_END();
