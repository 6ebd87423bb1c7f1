/**
 * Self-contained snapshot export. The document embeds the bundle data and
 * a small standalone replayer, so it opens from disk with no toolkit
 * installed; only the map tiles still come over the network.
 */

export interface SnapshotState {
  windowIndex: number;
  view: string;
}

export interface SnapshotOptions {
  tileTemplate: string;
  title?: string;
}

function escapeForScriptTag(json: string): string {
  return json.replace(/<\//g, "<\\/");
}

export function buildSnapshot(bundleJson: string, state: SnapshotState,
                              options: SnapshotOptions): string {
  const data = escapeForScriptTag(bundleJson);
  const title = options.title ?? "patmaps snapshot";
  return `<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="UTF-8">
<title>${title}</title>
<style>
  body { margin: 0; font-family: system-ui, sans-serif; }
  #bar { padding: 8px 12px; background: #1e2430; color: #eee; display: flex; gap: 10px; align-items: center; }
  #bar button { min-width: 2.2em; }
  #map { position: relative; width: 100vw; height: calc(100vh - 46px); overflow: hidden; background: #cdd6e0; }
  .tile { position: absolute; width: 256px; height: 256px; }
  .node { position: absolute; border-radius: 50%; border: 1px solid rgba(0,0,0,.45); transform: translate(-50%,-50%); cursor: pointer; }
  #popup { position: absolute; display: none; background: #fff; border: 1px solid #555; border-radius: 4px; padding: 6px 9px; font-size: 12px; max-width: 300px; z-index: 5; }
  #legend { position: absolute; right: 10px; top: 10px; background: rgba(255,255,255,.95); border: 1px solid #777; border-radius: 4px; padding: 6px 10px; font-size: 12px; z-index: 4; }
  .swatch { display: inline-block; width: 10px; height: 10px; border-radius: 50%; margin-right: 6px; }
  svg.links { position: absolute; left: 0; top: 0; width: 100%; height: 100%; pointer-events: none; }
</style>
</head>
<body>
<div id="bar">
  <button id="prev">&lt;</button>
  <span id="label"></span>
  <button id="next">&gt;</button>
  <span style="margin-left:auto">saved view</span>
</div>
<div id="map"></div>
<div id="popup"></div>
<script id="bundle-data" type="application/json">${data}</script>
<script>
(function () {
  "use strict";
  var TILE = ${JSON.stringify(options.tileTemplate)};
  var bundle = JSON.parse(document.getElementById("bundle-data").textContent);
  var index = ${JSON.stringify(state.windowIndex)};
  var TS = 256;

  function worldSize(z) { return TS * Math.pow(2, z); }
  function lonX(lon, z) { return (lon + 180) / 360 * worldSize(z); }
  function latY(lat, z) {
    var c = Math.max(-85.0511, Math.min(85.0511, lat)) * Math.PI / 180;
    return (1 - Math.log(Math.tan(Math.PI / 4 + c / 2)) / Math.PI) / 2 * worldSize(z);
  }
  function fit(entry, w, h) {
    if (!entry.cities.length) return { lat: 30, lon: 0, zoom: 2 };
    var lats = entry.cities.map(function (c) { return c.lat; });
    var lons = entry.cities.map(function (c) { return c.lon; });
    var lat = (Math.min.apply(null, lats) + Math.max.apply(null, lats)) / 2;
    var lon = (Math.min.apply(null, lons) + Math.max.apply(null, lons)) / 2;
    for (var z = 12; z >= 1; z--) {
      var ww = Math.abs(lonX(Math.max.apply(null, lons), z) - lonX(Math.min.apply(null, lons), z));
      var hh = Math.abs(latY(Math.min.apply(null, lats), z) - latY(Math.max.apply(null, lats), z));
      if (ww <= w * 0.8 && hh <= h * 0.8) return { lat: lat, lon: lon, zoom: z };
    }
    return { lat: lat, lon: lon, zoom: 1 };
  }
  function colorOf(cls) {
    for (var i = 0; i < bundle.legend.length; i++)
      if (bundle.legend[i]["class"] === cls) return bundle.legend[i].color;
    return "#888";
  }

  var map = document.getElementById("map");
  var popup = document.getElementById("popup");

  function render() {
    var entry = bundle.entries[index];
    document.getElementById("label").textContent =
      entry.window + " (" + bundle.scheme + ", " + bundle.dimension + ")";
    map.innerHTML = "";
    popup.style.display = "none";
    var w = map.clientWidth, h = map.clientHeight;
    var view = fit(entry, w, h);
    var z = view.zoom;
    var ox = lonX(view.lon, z) - w / 2;
    var oy = latY(view.lat, z) - h / 2;

    var x0 = Math.floor(ox / TS), y0 = Math.floor(oy / TS);
    var x1 = Math.floor((ox + w) / TS), y1 = Math.floor((oy + h) / TS);
    var max = (1 << z) - 1;
    for (var tx = x0; tx <= x1; tx++) {
      for (var ty = Math.max(0, y0); ty <= Math.min(max, y1); ty++) {
        var img = document.createElement("img");
        var wx = ((tx % (1 << z)) + (1 << z)) % (1 << z);
        img.className = "tile";
        img.src = TILE.replace("{z}", z).replace("{x}", wx).replace("{y}", ty);
        img.style.left = (tx * TS - ox) + "px";
        img.style.top = (ty * TS - oy) + "px";
        map.appendChild(img);
      }
    }

    var svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    svg.setAttribute("class", "links");
    var at = {};
    entry.cities.forEach(function (c) {
      at[c.name] = [lonX(c.lon, z) - ox, latY(c.lat, z) - oy];
    });
    entry.links.forEach(function (lk) {
      var a = at[lk[0]], b = at[lk[1]];
      if (!a || !b) return;
      var line = document.createElementNS("http://www.w3.org/2000/svg", "line");
      line.setAttribute("x1", a[0]); line.setAttribute("y1", a[1]);
      line.setAttribute("x2", b[0]); line.setAttribute("y2", b[1]);
      line.setAttribute("stroke", "#33425b");
      line.setAttribute("stroke-width", Math.min(1 + lk[2], 6));
      line.setAttribute("stroke-opacity", "0.55");
      svg.appendChild(line);
    });
    map.appendChild(svg);

    entry.cities.forEach(function (c) {
      var el = document.createElement("div");
      var r = 4 + 9 * c.scale;
      el.className = "node";
      el.style.width = (2 * r) + "px";
      el.style.height = (2 * r) + "px";
      el.style.left = (lonX(c.lon, z) - ox) + "px";
      el.style.top = (latY(c.lat, z) - oy) + "px";
      el.style.background = colorOf(c.color);
      el.title = c.name;
      el.onclick = function (ev) {
        var lines = c.desc.split("; ");
        entry.links.forEach(function (lk) {
          if (lk[0] === c.name) lines.push("link " + lk[1] + " (" + lk[2] + ")");
          else if (lk[1] === c.name) lines.push("link " + lk[0] + " (" + lk[2] + ")");
        });
        popup.innerHTML = "<b>" + c.name + "</b><br>" + lines.join("<br>");
        popup.style.left = (ev.pageX + 12) + "px";
        popup.style.top = (ev.pageY + 12) + "px";
        popup.style.display = "block";
        ev.stopPropagation();
      };
      map.appendChild(el);
    });

    var legend = document.createElement("div");
    legend.id = "legend";
    legend.innerHTML = "<b>" + bundle.scheme + "</b><br>" + bundle.legend.map(function (e) {
      return '<span class="swatch" style="background:' + e.color + '"></span>' +
        e["class"] + " &mdash; " + e.meaning;
    }).join("<br>");
    map.appendChild(legend);
  }

  document.getElementById("prev").onclick = function () {
    index = Math.max(0, index - 1); render();
  };
  document.getElementById("next").onclick = function () {
    index = Math.min(bundle.entries.length - 1, index + 1); render();
  };
  document.body.onclick = function () { popup.style.display = "none"; };
  window.onresize = render;
  render();
})();
</script>
</body>
</html>
`;
}
