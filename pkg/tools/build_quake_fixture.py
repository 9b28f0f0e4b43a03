"""Write the bundled Pacific-rim great-earthquake fixture.

The rows are hand-curated approximate epicentres and magnitudes of large
shallow-to-deep events around the Pacific since 1900, in the column layout
of a USGS FDSN csv export.  They are not a verbatim catalog download; a
live query can be substituted with ``fetch_usgs.py``.
"""

import csv
import sys
from pathlib import Path

EVENTS = [
    # time, lat, lon, depth_km, mag, magType, place
    ("1906-01-31T15:36:10", 1.00, -81.50, 20, 8.8, "mw", "off the coast of Ecuador"),
    ("1906-04-18T13:12:21", 37.75, -122.55, 8, 7.9, "mw", "San Francisco, California"),
    ("1906-08-17T00:10:40", 51.00, 179.00, 25, 8.0, "mw", "Rat Islands, Aleutian Islands"),
    ("1906-08-17T00:40:00", -33.00, -72.00, 25, 8.2, "mw", "Valparaiso, Chile"),
    ("1907-04-15T06:08:00", 16.70, -99.20, 25, 7.9, "mw", "Guerrero, Mexico"),
    ("1911-06-15T14:26:00", 28.00, 130.00, 100, 8.1, "mw", "Ryukyu Islands, Japan"),
    ("1914-05-26T14:22:00", -2.00, 137.00, 30, 8.0, "mw", "near the north coast of New Guinea"),
    ("1917-06-26T05:49:00", -15.50, -173.00, 25, 8.5, "mw", "Samoa Islands region"),
    ("1918-08-15T12:18:00", 5.70, 123.00, 25, 8.3, "mw", "Celebes Sea"),
    ("1918-09-07T17:16:00", 45.50, 151.50, 20, 8.2, "mw", "Kuril Islands"),
    ("1919-04-30T07:17:00", -19.80, -172.20, 30, 8.2, "mw", "Tonga"),
    ("1919-05-06T19:41:00", -5.00, 154.00, 30, 8.1, "mw", "Solomon Sea"),
    ("1920-06-05T04:21:00", 23.50, 122.00, 20, 8.0, "mw", "Taiwan region"),
    ("1922-11-11T04:32:00", -28.50, -70.00, 35, 8.5, "mw", "Atacama, Chile"),
    ("1923-02-03T16:01:00", 54.00, 161.00, 20, 8.4, "mw", "Kamchatka, Russia"),
    ("1923-09-01T02:58:00", 35.30, 139.50, 15, 7.9, "mw", "Kanto, Japan"),
    ("1924-04-14T16:20:00", 6.50, 126.50, 25, 8.0, "mw", "Mindanao, Philippines"),
    ("1932-06-03T10:36:00", 19.50, -104.50, 25, 8.1, "mw", "Jalisco, Mexico"),
    ("1933-03-02T17:31:00", 39.20, 144.50, 15, 8.4, "mw", "off Sanriku, Japan"),
    ("1934-07-18T19:40:00", -11.80, 166.50, 15, 8.1, "mw", "Santa Cruz Islands"),
    ("1938-02-01T19:04:00", -5.05, 131.60, 25, 8.4, "mw", "Banda Sea"),
    ("1938-11-10T20:18:00", 55.50, -158.00, 35, 8.2, "mw", "Shumagin Islands, Alaska"),
    ("1939-04-30T02:55:00", -10.50, 158.50, 30, 8.0, "mw", "Solomon Islands"),
    ("1940-05-24T16:33:00", -10.50, -77.00, 60, 8.2, "mw", "near the coast of central Peru"),
    ("1942-08-24T22:50:00", -15.00, -76.00, 35, 8.2, "mw", "near the coast of southern Peru"),
    ("1943-04-06T16:07:00", -30.80, -72.00, 30, 8.2, "mw", "Coquimbo, Chile"),
    ("1944-12-07T04:35:00", 33.80, 136.60, 30, 8.1, "mw", "Tonankai, Japan"),
    ("1946-04-01T12:28:00", 53.30, -163.20, 15, 8.6, "mw", "Unimak Island, Alaska"),
    ("1946-12-20T19:19:00", 33.00, 135.60, 30, 8.1, "mw", "Nankai, Japan"),
    ("1949-08-22T04:01:00", 53.60, -133.30, 15, 8.1, "mw", "Queen Charlotte Islands, Canada"),
    ("1952-03-04T01:22:00", 42.00, 143.90, 45, 8.1, "mw", "Hokkaido, Japan"),
    ("1952-11-04T16:58:00", 52.80, 159.50, 20, 9.0, "mw", "Kamchatka, Russia"),
    ("1957-03-09T14:22:00", 51.60, -175.40, 30, 8.6, "mw", "Andreanof Islands, Aleutian Islands"),
    ("1958-11-06T22:58:00", 44.40, 148.60, 35, 8.3, "mw", "Kuril Islands"),
    ("1959-05-04T07:15:00", 53.40, 159.80, 30, 8.0, "mw", "near the east coast of Kamchatka"),
    ("1960-05-21T10:02:00", -37.50, -73.50, 30, 8.1, "mw", "Concepcion, Chile"),
    ("1960-05-22T19:11:00", -38.20, -73.00, 25, 9.5, "mw", "Valdivia, Chile"),
    ("1963-10-13T05:17:00", 44.80, 149.50, 30, 8.5, "mw", "Kuril Islands"),
    ("1964-03-28T03:36:00", 61.00, -147.70, 25, 9.2, "mw", "Prince William Sound, Alaska"),
    ("1965-02-04T05:01:00", 51.20, 178.50, 30, 8.7, "mw", "Rat Islands, Aleutian Islands"),
    ("1966-10-17T21:41:00", -10.80, -78.70, 35, 8.1, "mw", "near the coast of central Peru"),
    ("1968-05-16T00:48:00", 40.90, 143.40, 25, 8.2, "mw", "off Tokachi, Japan"),
    ("1969-08-11T21:27:00", 43.50, 147.40, 30, 8.2, "mw", "Kuril Islands"),
    ("1970-05-31T20:23:00", -9.20, -78.80, 45, 7.9, "mw", "Ancash, Peru"),
    ("1970-07-31T17:08:00", -1.50, -72.60, 650, 8.0, "mw", "southern Colombia (deep)"),
    ("1971-07-14T06:11:00", -5.50, 153.90, 40, 8.0, "mw", "New Ireland region, Papua New Guinea"),
    ("1971-07-26T01:23:00", -4.90, 153.20, 40, 8.1, "mw", "New Ireland region, Papua New Guinea"),
    ("1974-10-03T14:21:00", -12.30, -77.80, 15, 8.1, "mw", "near the coast of central Peru"),
    ("1976-08-16T16:11:00", 6.30, 124.00, 30, 8.0, "mw", "Moro Gulf, Mindanao, Philippines"),
    ("1979-12-12T07:59:00", 1.60, -79.40, 25, 8.1, "mw", "near the coast of Ecuador-Colombia"),
    ("1985-03-03T22:47:00", -33.10, -71.90, 35, 8.0, "mw", "offshore Valparaiso, Chile"),
    ("1985-09-19T13:17:00", 18.20, -102.50, 25, 8.0, "mw", "Michoacan, Mexico"),
    ("1986-05-07T22:47:00", 51.50, -174.80, 30, 8.0, "mw", "Andreanof Islands, Aleutian Islands"),
    ("1989-05-23T10:54:00", -52.30, 160.60, 10, 8.2, "mw", "Macquarie Island region"),
    ("1994-06-09T00:33:00", -13.80, -67.60, 630, 8.2, "mw", "northern Bolivia (deep)"),
    ("1994-10-04T13:22:00", 43.80, 147.30, 15, 8.3, "mw", "Kuril Islands"),
    ("1995-07-30T05:11:00", -23.30, -70.30, 45, 8.0, "mw", "Antofagasta, Chile"),
    ("1995-10-09T15:35:00", 19.10, -104.20, 30, 8.0, "mw", "Colima-Jalisco, Mexico"),
    ("1996-02-17T05:59:00", -0.90, 137.00, 30, 8.2, "mw", "Biak region, Indonesia"),
    ("1998-03-25T03:12:00", -62.90, 149.50, 10, 8.1, "mw", "Balleny Islands region"),
    ("2000-11-16T04:54:00", -4.00, 152.30, 30, 8.0, "mw", "New Ireland region, Papua New Guinea"),
    ("2001-06-23T20:33:00", -16.30, -73.60, 30, 8.4, "mw", "near the coast of southern Peru"),
    ("2003-09-25T19:50:00", 41.80, 143.90, 25, 8.3, "mw", "Hokkaido, Japan"),
    ("2004-12-23T14:59:00", -50.10, 160.40, 10, 8.1, "mw", "north of Macquarie Island"),
    ("2006-05-03T15:26:00", -20.20, -174.10, 55, 8.0, "mw", "Tonga"),
    ("2006-11-15T11:14:00", 46.60, 153.30, 10, 8.3, "mw", "Kuril Islands"),
    ("2007-01-13T04:23:00", 46.20, 154.50, 10, 8.1, "mw", "east of the Kuril Islands"),
    ("2007-04-01T20:39:00", -8.50, 157.00, 25, 8.1, "mw", "Solomon Islands"),
    ("2007-08-15T23:40:00", -13.40, -76.60, 40, 8.0, "mw", "near the coast of central Peru"),
    ("2009-09-29T17:48:00", -15.50, -172.10, 20, 8.1, "mw", "Samoa Islands region"),
    ("2010-02-27T06:34:00", -36.10, -72.90, 25, 8.8, "mw", "offshore Bio-Bio, Chile"),
    ("2011-03-11T05:46:00", 38.30, 142.40, 30, 9.1, "mw", "near the east coast of Honshu, Japan"),
    ("2013-02-06T01:12:00", -10.70, 165.10, 25, 8.0, "mw", "Santa Cruz Islands"),
    ("2013-05-24T05:44:00", 54.90, 153.20, 600, 8.3, "mw", "Sea of Okhotsk (deep)"),
    ("2014-04-01T23:46:00", -19.60, -70.80, 25, 8.2, "mw", "offshore Tarapaca, Chile"),
    ("2014-06-23T20:53:00", 51.80, 178.70, 110, 7.9, "mw", "Rat Islands, Aleutian Islands"),
    ("2015-09-16T22:54:00", -31.60, -71.70, 25, 8.3, "mw", "offshore Coquimbo, Chile"),
    ("2016-12-17T10:51:00", -4.50, 153.50, 95, 7.9, "mw", "New Ireland region, Papua New Guinea"),
    ("2017-09-08T04:49:00", 15.00, -93.90, 50, 8.2, "mw", "offshore Chiapas, Mexico"),
    ("2018-01-23T09:31:00", 56.00, -149.20, 15, 7.9, "mw", "Gulf of Alaska"),
    ("2018-08-19T00:19:00", -18.10, -178.20, 560, 8.2, "mw", "Fiji region (deep)"),
    ("2019-05-26T07:41:00", -5.80, -75.30, 110, 8.0, "mw", "northern Peru"),
    ("2021-03-04T19:28:00", -29.70, -177.30, 30, 8.1, "mw", "Kermadec Islands"),
    ("2021-07-29T06:15:00", 55.40, -157.90, 35, 8.2, "mw", "Alaska Peninsula"),
]

HEADER = ["time", "latitude", "longitude", "depth", "mag", "magType", "place"]


def main(out):
    rows = sorted(EVENTS)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(HEADER)
        for t, la, lo, dep, mag, mt, place in rows:
            w.writerow([t + ".000Z", f"{la:.2f}", f"{lo:.2f}", dep, f"{mag:.1f}", mt, place])
    big = sum(1 for e in rows if e[4] >= 8.0)
    print(f"wrote {len(rows)} rows ({big} with mag >= 8) to {out}")


if __name__ == "__main__":
    default = Path(__file__).resolve().parents[1] / "src/sphcurves/data/pacific_m8_catalog.csv"
    main(sys.argv[1] if len(sys.argv) > 1 else default)
