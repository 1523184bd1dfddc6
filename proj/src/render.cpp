#include "stylelab/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace stylelab {

namespace {

constexpr int kS = 32;

struct Color {
    double r, g, b;
};

struct NamedColor {
    const char* word;
    Color c;
};

const std::array<NamedColor, 6> kPalette = {{
    {"red", {0.85, 0.22, 0.20}},
    {"blue", {0.22, 0.38, 0.85}},
    {"green", {0.22, 0.68, 0.30}},
    {"yellow", {0.92, 0.84, 0.25}},
    {"purple", {0.58, 0.30, 0.75}},
    {"white", {0.93, 0.93, 0.93}},
}};

struct Canvas {
    Tensor img{std::vector<int>{3, kS, kS}};
    Tensor mask{std::vector<int>{kS, kS}};
    bool mark_mask = false;

    void put(int x, int y, const Color& c) {
        if (x < 0 || x >= kS || y < 0 || y >= kS) return;
        img.at(0, y, x) = c.r;
        img.at(1, y, x) = c.g;
        img.at(2, y, x) = c.b;
        if (mark_mask) mask.at(y, x) = 1.0;
    }

    void fill_rect(int x0, int y0, int x1, int y1, const Color& c) {
        for (int y = std::max(0, y0); y <= std::min(kS - 1, y1); ++y)
            for (int x = std::max(0, x0); x <= std::min(kS - 1, x1); ++x) put(x, y, c);
    }

    void fill_circle(double cx, double cy, double r, const Color& c) {
        const int x0 = static_cast<int>(std::floor(cx - r)), x1 = static_cast<int>(std::ceil(cx + r));
        const int y0 = static_cast<int>(std::floor(cy - r)), y1 = static_cast<int>(std::ceil(cy + r));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) put(x, y, c);
    }

    void fill_triangle(double ax, double ay, double bx, double by, double cx, double cy,
                       const Color& col) {
        auto edge = [](double x0, double y0, double x1, double y1, double px, double py) {
            return (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0);
        };
        const int minx = static_cast<int>(std::floor(std::min({ax, bx, cx})));
        const int maxx = static_cast<int>(std::ceil(std::max({ax, bx, cx})));
        const int miny = static_cast<int>(std::floor(std::min({ay, by, cy})));
        const int maxy = static_cast<int>(std::ceil(std::max({ay, by, cy})));
        for (int y = miny; y <= maxy; ++y) {
            for (int x = minx; x <= maxx; ++x) {
                const double e0 = edge(ax, ay, bx, by, x, y);
                const double e1 = edge(bx, by, cx, cy, x, y);
                const double e2 = edge(cx, cy, ax, ay, x, y);
                if ((e0 >= 0 && e1 >= 0 && e2 >= 0) || (e0 <= 0 && e1 <= 0 && e2 <= 0))
                    put(x, y, col);
            }
        }
    }

    void line(double x0, double y0, double x1, double y1, const Color& c) {
        const double steps = std::max(std::abs(x1 - x0), std::abs(y1 - y0)) * 2 + 1;
        for (int i = 0; i <= static_cast<int>(steps); ++i) {
            const double f = i / steps;
            put(static_cast<int>(std::lround(x0 + f * (x1 - x0))),
                static_cast<int>(std::lround(y0 + f * (y1 - y0))), c);
        }
    }
};

Color mix(const Color& a, const Color& b, double f) {
    return {a.r + f * (b.r - a.r), a.g + f * (b.g - a.g), a.b + f * (b.b - a.b)};
}

Color shade(const Color& c, double f) { return {c.r * f, c.g * f, c.b * f}; }

// sky + ground; kind 0 = day, 1 = dusk, 2 = night
void paint_backdrop(Canvas& cv, Rng& rng, int kind, int horizon) {
    Color sky_top, sky_bot, ground;
    if (kind == 0) {
        sky_top = {0.35, 0.55, 0.92};
        sky_bot = {0.70, 0.82, 0.95};
        ground = {0.30, 0.60, 0.28};
    } else if (kind == 1) {
        sky_top = {0.45, 0.30, 0.55};
        sky_bot = {0.95, 0.60, 0.35};
        ground = {0.28, 0.40, 0.24};
    } else {
        sky_top = {0.05, 0.06, 0.18};
        sky_bot = {0.12, 0.15, 0.32};
        ground = {0.10, 0.18, 0.14};
    }
    const double jig = 0.04;
    for (int y = 0; y < kS; ++y) {
        for (int x = 0; x < kS; ++x) {
            Color c;
            if (y < horizon) {
                c = mix(sky_top, sky_bot, static_cast<double>(y) / horizon);
            } else {
                c = shade(ground, 1.0 - 0.3 * (y - horizon) / (kS - horizon));
            }
            const double n = (rng.uniform() - 0.5) * jig;
            cv.put(x, y, {c.r + n, c.g + n, c.b + n});
        }
    }
}

void draw_cloud(Canvas& cv, Rng& rng, int horizon) {
    const double cx = 3 + rng.uniform() * 26;
    const double cy = 2 + rng.uniform() * (horizon * 0.5);
    Color c{0.92, 0.93, 0.95};
    cv.fill_circle(cx, cy, 2.2, c);
    cv.fill_circle(cx + 2.5, cy + 0.5, 1.8, c);
    cv.fill_circle(cx - 2.5, cy + 0.6, 1.6, c);
}

void draw_tree(Canvas& cv, Rng& rng, double bx, double by, double scale) {
    Color trunk{0.42, 0.28, 0.15};
    Color crown = mix({0.15, 0.50, 0.20}, {0.30, 0.70, 0.30}, rng.uniform());
    cv.fill_rect(static_cast<int>(bx - scale * 0.6), static_cast<int>(by - 3 * scale),
                 static_cast<int>(bx + scale * 0.6), static_cast<int>(by), trunk);
    cv.fill_circle(bx, by - 4 * scale, 2.6 * scale, crown);
}

}  // namespace

Scene render_background_scene(Rng& rng) {
    Scene s;
    Canvas cv;
    static const char* kObjects[] = {"mountain", "tree",   "house", "sun",
                                     "moon",     "forest", "lake",  "castle"};
    const int obj = static_cast<int>(rng.uniform_int(8));
    int kind = (obj == 4) ? 2 : static_cast<int>(rng.uniform_int(2));  // moon scenes at night
    if (obj == 3) kind = 0;                                            // sun scenes by day
    const int horizon = 14 + static_cast<int>(rng.uniform_int(8));
    paint_backdrop(cv, rng, kind, horizon);

    std::string color_word;
    switch (obj) {
        case 0: {  // mountain: 2-3 gray peaks
            const int peaks = 2 + static_cast<int>(rng.uniform_int(2));
            for (int i = 0; i < peaks; ++i) {
                const double cx = 4 + rng.uniform() * 24;
                const double pw = 6 + rng.uniform() * 6;
                const double ph = 6 + rng.uniform() * 7;
                Color rock = shade({0.55, 0.52, 0.55}, 0.7 + 0.3 * rng.uniform());
                cv.fill_triangle(cx - pw, horizon, cx + pw, horizon, cx, horizon - ph, rock);
                cv.fill_triangle(cx - pw * 0.25, horizon - ph * 0.55, cx + pw * 0.25,
                                 horizon - ph * 0.55, cx, horizon - ph, {0.95, 0.95, 0.97});
            }
            break;
        }
        case 1:
            draw_tree(cv, rng, 10 + rng.uniform() * 12, horizon + 6 + rng.uniform() * 6,
                      1.4 + rng.uniform() * 0.8);
            color_word = "green";
            break;
        case 2: {  // house
            const int hx = 8 + static_cast<int>(rng.uniform_int(12));
            const int hy = horizon + 2 + static_cast<int>(rng.uniform_int(6));
            const auto& wall = kPalette[rng.uniform_int(kPalette.size())];
            color_word = wall.word;
            cv.fill_rect(hx, hy, hx + 9, hy + 7, wall.c);
            cv.fill_triangle(hx - 1, hy, hx + 10, hy, hx + 4.5, hy - 5, {0.50, 0.22, 0.15});
            cv.fill_rect(hx + 3, hy + 3, hx + 5, hy + 7, {0.30, 0.18, 0.10});  // door
            break;
        }
        case 3:
            cv.fill_circle(6 + rng.uniform() * 20, 3 + rng.uniform() * 5, 3.2, {0.98, 0.88, 0.35});
            color_word = "yellow";
            break;
        case 4:
            cv.fill_circle(6 + rng.uniform() * 20, 3 + rng.uniform() * 5, 2.8, {0.90, 0.90, 0.82});
            for (int i = 0; i < 12; ++i)
                cv.put(static_cast<int>(rng.uniform_int(kS)),
                       static_cast<int>(rng.uniform_int(horizon)), {0.95, 0.95, 0.90});
            color_word = "white";
            break;
        case 5:  // forest: several trees
            for (int i = 0; i < 4; ++i)
                draw_tree(cv, rng, 4 + i * 8 + rng.uniform() * 3,
                          horizon + 4 + rng.uniform() * 8, 0.9 + rng.uniform() * 0.5);
            color_word = "green";
            break;
        case 6: {  // lake on the ground
            const double cx = 10 + rng.uniform() * 12;
            const double cy = horizon + 5 + rng.uniform() * 5;
            Color water{0.25, 0.45, 0.80};
            for (int y = -3; y <= 3; ++y)
                for (int x = -8; x <= 8; ++x)
                    if (x * x / 64.0 + y * y / 9.0 <= 1.0)
                        cv.put(static_cast<int>(cx) + x, static_cast<int>(cy) + y,
                               mix(water, {0.5, 0.7, 0.95}, rng.uniform() * 0.3));
            color_word = "blue";
            break;
        }
        default: {  // castle: body + two towers
            const int hx = 7 + static_cast<int>(rng.uniform_int(10));
            const int hy = horizon + 1 + static_cast<int>(rng.uniform_int(4));
            Color stone{0.55, 0.55, 0.60};
            cv.fill_rect(hx, hy, hx + 12, hy + 8, stone);
            cv.fill_rect(hx - 2, hy - 4, hx + 1, hy + 8, shade(stone, 0.85));
            cv.fill_rect(hx + 11, hy - 4, hx + 14, hy + 8, shade(stone, 0.85));
            cv.fill_triangle(hx - 3, hy - 4, hx + 2, hy - 4, hx - 0.5, hy - 8, {0.6, 0.2, 0.2});
            cv.fill_triangle(hx + 10, hy - 4, hx + 15, hy - 4, hx + 12.5, hy - 8, {0.6, 0.2, 0.2});
            break;
        }
    }
    const int accents = 2 + static_cast<int>(rng.uniform_int(2));
    for (int i = 0; i < accents; ++i) {
        if (kind == 2) {
            cv.put(static_cast<int>(rng.uniform_int(kS)),
                   static_cast<int>(rng.uniform_int(std::max(1, horizon - 1))),
                   {0.9, 0.9, 0.85});
        } else {
            draw_cloud(cv, rng, horizon);
        }
    }
    s.image = std::move(cv.img);
    s.person_mask = std::move(cv.mask);
    s.background_word = kObjects[obj];
    s.color_word = color_word;
    return s;
}

Scene render_person_scene(Rng& rng) {
    Scene s;
    Canvas cv;
    static const char* kPersons[] = {"woman", "man",    "girl",   "boy",   "child",
                                     "farmer", "dancer", "knight", "wizard", "sailor"};
    const int who = static_cast<int>(rng.uniform_int(10));
    const int kind = static_cast<int>(rng.uniform_int(2));
    const int horizon = 15 + static_cast<int>(rng.uniform_int(6));
    paint_backdrop(cv, rng, kind, horizon);
    if (kind == 0 && rng.uniform() < 0.5)
        cv.fill_circle(4 + rng.uniform() * 4, 4 + rng.uniform() * 3, 2.0, {0.98, 0.88, 0.35});

    // figure proportions; smaller for girl/boy/child
    const bool small = (who == 2 || who == 3 || who == 4);
    const double height = (small ? 13.0 : 17.0) + rng.uniform() * 4.0;
    const double cx = 12 + rng.uniform() * 8;
    const double feet = 27 + rng.uniform() * 3;
    const double head_r = small ? 2.2 : 2.8;
    const double head_cy = feet - height + head_r;
    const double torso_top = head_cy + head_r + 1;
    const double torso_h = height * 0.38;
    const double torso_w = (small ? 2.2 : 3.0) + rng.uniform() * 1.2;

    static const Color kSkin[] = {{0.95, 0.80, 0.66}, {0.85, 0.64, 0.48}, {0.60, 0.42, 0.30}};
    const Color skin = kSkin[rng.uniform_int(3)];

    // outfit color keys the person word where it has a canonical look
    int shirt_idx = static_cast<int>(rng.uniform_int(kPalette.size()));
    if (who == 7) shirt_idx = 5;  // knight in white/gray
    if (who == 8) shirt_idx = 4;  // wizard in purple
    if (who == 9) shirt_idx = 1;  // sailor in blue
    const auto& shirt = kPalette[static_cast<size_t>(shirt_idx)];
    Color shirt_c = (who == 7) ? Color{0.62, 0.64, 0.70} : shirt.c;

    cv.mark_mask = true;
    // legs
    Color pants = shade({0.25, 0.25, 0.35}, 0.8 + 0.4 * rng.uniform());
    const double hip = torso_top + torso_h;
    cv.line(cx - 1.2, hip, cx - 1.8 - rng.uniform(), feet, pants);
    cv.line(cx + 1.2, hip, cx + 1.8 + rng.uniform(), feet, pants);
    cv.line(cx - 1.2 + 1, hip, cx - 1.8 - rng.uniform() + 1, feet, pants);
    cv.line(cx + 1.2 - 1, hip, cx + 1.8 + rng.uniform() - 1, feet, pants);
    // torso
    cv.fill_rect(static_cast<int>(cx - torso_w), static_cast<int>(torso_top),
                 static_cast<int>(cx + torso_w), static_cast<int>(hip), shirt_c);
    if (who == 9) {  // sailor stripes
        for (int y = static_cast<int>(torso_top) + 1; y < static_cast<int>(hip); y += 2)
            cv.fill_rect(static_cast<int>(cx - torso_w), y, static_cast<int>(cx + torso_w), y,
                         {0.95, 0.95, 0.95});
    }
    // arms: dancer raises them, others angle down
    const double arm_y = torso_top + 1.5;
    const double arm_len = torso_h * 0.9;
    if (who == 6) {
        cv.line(cx - torso_w, arm_y, cx - torso_w - 2.5, arm_y - arm_len * 0.8, skin);
        cv.line(cx + torso_w, arm_y, cx + torso_w + 2.5, arm_y - arm_len * 0.8, skin);
    } else {
        const double spread = 1.5 + rng.uniform() * 1.5;
        cv.line(cx - torso_w, arm_y, cx - torso_w - spread, arm_y + arm_len, skin);
        cv.line(cx + torso_w, arm_y, cx + torso_w + spread, arm_y + arm_len, skin);
    }
    // head + face (eyes and mouth stay >= 3 dark pixels total)
    cv.fill_circle(cx, head_cy, head_r, skin);
    Color dark{0.10, 0.08, 0.08};
    cv.put(static_cast<int>(cx - 1), static_cast<int>(head_cy - 1), dark);
    cv.put(static_cast<int>(cx + 1), static_cast<int>(head_cy - 1), dark);
    cv.put(static_cast<int>(cx), static_cast<int>(head_cy + 1), dark);
    // hair / headgear
    if (who == 0 || who == 2) {  // woman/girl hair
        Color hair{0.35, 0.22, 0.12};
        cv.fill_circle(cx, head_cy - head_r * 0.7, head_r * 0.8, hair);
        cv.line(cx - head_r, head_cy, cx - head_r, head_cy + 2, hair);
        cv.line(cx + head_r, head_cy, cx + head_r, head_cy + 2, hair);
    } else if (who == 5) {  // farmer hat
        cv.fill_rect(static_cast<int>(cx - head_r - 1), static_cast<int>(head_cy - head_r - 1),
                     static_cast<int>(cx + head_r + 1), static_cast<int>(head_cy - head_r),
                     {0.75, 0.60, 0.30});
    } else if (who == 8) {  // wizard hat
        cv.fill_triangle(cx - head_r, head_cy - head_r + 1, cx + head_r, head_cy - head_r + 1,
                         cx, head_cy - head_r - 4, {0.45, 0.20, 0.60});
    }
    cv.mark_mask = false;

    s.image = std::move(cv.img);
    s.person_mask = std::move(cv.mask);
    s.person_word = kPersons[who];
    s.background_word = "field";
    s.color_word = shirt.word;
    return s;
}

}  // namespace stylelab
