// GeoJSON -> SVG. The datasets are planar and synthetic, so the map is a
// fitted viewport over raw coordinates: no tiles, no projection.
const WIDTH = 640;
const HEIGHT = 480;
const PAD = 18;
const TYPE_COLORS = {
    BasicSpatial: "#2c7fb8",
    TimeInterval: "#7b3294",
    Range: "#0a9396",
    NearestNeighbor: "#d95f02",
    Join: "#1b9e77",
    Similarity: "#c51b8a",
    Aggregation: "#636363",
};
export function esc(text) {
    return String(text)
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}
function* coordsOf(feature) {
    const geom = feature.geometry;
    if (!geom)
        return;
    if (geom.type === "Point") {
        yield geom.coordinates;
    }
    else if (geom.type === "LineString") {
        yield* geom.coordinates;
    }
    else if (geom.type === "Polygon") {
        for (const ring of geom.coordinates)
            yield* ring;
    }
}
export function fitBounds(fc) {
    let bounds = null;
    for (const feature of fc.features) {
        for (const [x, y] of coordsOf(feature)) {
            if (bounds === null) {
                bounds = { xmin: x, ymin: y, xmax: x, ymax: y };
            }
            else {
                bounds.xmin = Math.min(bounds.xmin, x);
                bounds.ymin = Math.min(bounds.ymin, y);
                bounds.xmax = Math.max(bounds.xmax, x);
                bounds.ymax = Math.max(bounds.ymax, y);
            }
        }
    }
    return bounds;
}
function projector(bounds) {
    const spanX = Math.max(bounds.xmax - bounds.xmin, 1e-9);
    const spanY = Math.max(bounds.ymax - bounds.ymin, 1e-9);
    const scale = Math.min((WIDTH - 2 * PAD) / spanX, (HEIGHT - 2 * PAD) / spanY);
    return (x, y) => [
        PAD + (x - bounds.xmin) * scale,
        // dataset y grows north; svg y grows down
        HEIGHT - PAD - (y - bounds.ymin) * scale,
    ];
}
/** Render the feature collection as a standalone SVG string. */
export function renderMap(fc, queryType) {
    const bounds = fitBounds(fc);
    if (bounds === null) {
        return `<p class="notice">no results to draw</p>`;
    }
    const project = projector(bounds);
    const color = TYPE_COLORS[queryType ?? ""] ?? "#2c7fb8";
    const shapes = [];
    const links = [];
    const labels = [];
    for (const feature of fc.features) {
        const geom = feature.geometry;
        if (!geom)
            continue;
        const isLink = feature.properties["link"] === true;
        if (geom.type === "Point") {
            const [x, y] = project(...geom.coordinates);
            shapes.push(`<circle cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="3.5" fill="${color}">` +
                `<title>${esc(titleOf(feature))}</title></circle>`);
        }
        else if (geom.type === "LineString") {
            const pts = geom.coordinates
                .map(([x, y]) => project(x, y).map((v) => v.toFixed(1)).join(","))
                .join(" ");
            if (isLink) {
                const rank = feature.properties["rank"];
                links.push(`<polyline points="${pts}" fill="none" stroke="#e41a1c" ` +
                    `stroke-width="1.2" stroke-dasharray="4 3" class="knn-link"/>`);
                const end = project(...geom.coordinates[geom.coordinates.length - 1]);
                labels.push(`<text x="${(end[0] + 4).toFixed(1)}" y="${(end[1] - 3).toFixed(1)}" ` +
                    `class="rank-label">${esc(rank)}</text>`);
            }
            else {
                shapes.push(`<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="2">` +
                    `<title>${esc(titleOf(feature))}</title></polyline>`);
            }
        }
        else if (geom.type === "Polygon") {
            const rings = geom.coordinates
                .map((ring) => "M" + ring.map(([x, y]) => project(x, y).map((v) => v.toFixed(1)).join(" ")).join(" L") + " Z")
                .join(" ");
            shapes.push(`<path d="${rings}" fill="${color}" fill-opacity="0.25" stroke="${color}" ` +
                `fill-rule="evenodd"><title>${esc(titleOf(feature))}</title></path>`);
        }
    }
    return `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="map" role="img">` +
        `<rect width="${WIDTH}" height="${HEIGHT}" fill="#fbfbf8"/>` +
        shapes.join("") + links.join("") + labels.join("") + `</svg>`;
}
function titleOf(feature) {
    const props = feature.properties;
    const name = props["name"] ?? props["attribute"] ?? "";
    return String(name);
}
export function countRankLabels(svg) {
    return (svg.match(/class="rank-label"/g) ?? []).length;
}
