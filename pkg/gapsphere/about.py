
GS_TITLE = "GapSphere"
GS_VERSION = "1.0"
