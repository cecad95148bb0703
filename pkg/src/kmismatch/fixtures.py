"""Small hand-written kernel-like trees for the four mismatch categories.

Each scenario is a handful of Kconfig, Makefile and C files modeled on the
corresponding kernel subsystem. Scenarios can be combined; makefiles that
several scenarios touch are merged line by line.
"""

from __future__ import annotations

import os

__all__ = ["SCENARIOS", "FIXTURES", "FIXTURE_LABELS", "fixture_files", "write_fixture"]

_BASE_KCONFIG = '''mainmenu "Fixture kernel configuration"

config MODULES
	bool "Enable loadable module support"
	help
	  Kernel modules are small pieces of compiled code which can
	  be inserted in the running kernel.
'''

_STUB_C = '''#include <linux/module.h>

static int {name}_probe(void)
{{
	return 0;
}}
'''

SCENARIOS: dict[str, dict] = {
    "ath5k": {
        "kconfig": ["drivers/net/wireless/ath5k/Kconfig"],
        "files": {
            "Makefile": "obj-y += drivers/\n",
            "drivers/Makefile": "obj-y += net/\n",
            "drivers/net/Makefile": "obj-y += wireless/\n",
            "drivers/net/wireless/Makefile": "obj-y += ath5k/\n",
            "drivers/net/wireless/ath5k/Kconfig": '''config ATH5K
	tristate "Atheros 5xxx wireless cards support"
	select ATH_PCI if !ATH_25
	help
	  This module adds support for wireless adapters based on
	  Atheros 5xxx chipset.

config ATH_25
	bool
	default n

config ATH_PCI
	bool "Atheros 5000 PCI/PCI-E support"
	help
	  This adds support for PCI type chipsets of the 5xxx Atheros
	  family.
''',
            "drivers/net/wireless/ath5k/Makefile": '''ath5k-y += base.o
ath5k-y += led.o
ath5k-$(CONFIG_ATH_PCI) += pci.o
obj-$(CONFIG_ATH5K) += ath5k.o
''',
            "drivers/net/wireless/ath5k/base.c": _STUB_C.format(name="base"),
            "drivers/net/wireless/ath5k/led.c": _STUB_C.format(name="led"),
            "drivers/net/wireless/ath5k/pci.c": _STUB_C.format(name="pci"),
        },
    },
    "vendor": {
        "kconfig": ["drivers/net/ethernet/qualcomm/Kconfig"],
        "files": {
            "Makefile": "obj-y += drivers/\n",
            "drivers/Makefile": "obj-y += net/\n",
            "drivers/net/Makefile": "obj-y += ethernet/\n",
            "drivers/net/ethernet/Makefile": "obj-$(CONFIG_NET_VENDOR_QUALCOMM) += qualcomm/\n",
            "drivers/net/ethernet/qualcomm/Kconfig": '''config SPI_MASTER
	bool "SPI master support"

config NET_VENDOR_QUALCOMM
	bool "Qualcomm devices"
	default y
	help
	  If you have a network (Ethernet) card belonging to this class, say Y.

	  Note that the answer to this question doesn't directly affect the
	  kernel: saying N will just cause the configurator to skip all
	  the questions about Qualcomm cards. If you say Y, you will be asked
	  for your specific card in the following questions.

if NET_VENDOR_QUALCOMM

config QCA7000
	tristate "Qualcomm Atheros QCA7000 support"
	depends on SPI_MASTER
	help
	  This SPI protocol driver supports the Qualcomm Atheros QCA7000.

endif # NET_VENDOR_QUALCOMM
''',
            "drivers/net/ethernet/qualcomm/Makefile": '''obj-$(CONFIG_QCA7000) += qcaspi.o
qcaspi-objs := qca_spi.o qca_framing.o qca_7k.o
''',
            "drivers/net/ethernet/qualcomm/qca_spi.c": _STUB_C.format(name="qca_spi"),
            "drivers/net/ethernet/qualcomm/qca_framing.c": _STUB_C.format(name="qca_framing"),
            "drivers/net/ethernet/qualcomm/qca_7k.c": _STUB_C.format(name="qca_7k"),
        },
    },
    "hsu": {
        "kconfig": ["drivers/dma/hsu/Kconfig", "drivers/tty/serial/8250/Kconfig"],
        "files": {
            "Makefile": "obj-y += drivers/\n",
            "drivers/Makefile": "obj-y += dma/\nobj-y += tty/\n",
            "drivers/dma/Makefile": "obj-$(CONFIG_HSU_DMA) += hsu/\n",
            "drivers/dma/hsu/Kconfig": '''# DMA engine configuration for hsu
config HSU_DMA
	bool

config HSU_DMA_PCI
	bool
	depends on HSU_DMA
	help
	  Support the High Speed UART DMA on the platforms that
	  enumerate it as a PCI device.
''',
            "drivers/dma/hsu/Makefile": '''obj-$(CONFIG_HSU_DMA) += hsu.o
obj-$(CONFIG_HSU_DMA_PCI) += pci.o
''',
            "drivers/dma/hsu/hsu.c": _STUB_C.format(name="hsu"),
            "drivers/dma/hsu/pci.c": _STUB_C.format(name="hsu_pci"),
            "drivers/tty/Makefile": "obj-y += serial/\n",
            "drivers/tty/serial/Makefile": "obj-y += 8250/\n",
            "drivers/tty/serial/8250/Kconfig": '''config SERIAL_8250_DMA
	bool "DMA support for 16550 compatible UART controllers"
	default y

config SERIAL_8250_MID
	bool "Support for serial ports on Intel MID platforms"
	select HSU_DMA if SERIAL_8250_DMA
	select HSU_DMA_PCI
	help
	  Selecting this option will enable handling of the extra features
	  present on the UART found on Intel Medfield SOC and various other
	  Intel platforms.
''',
            "drivers/tty/serial/8250/Makefile": "obj-$(CONFIG_SERIAL_8250_MID) += 8250_mid.o\n",
            "drivers/tty/serial/8250/8250_mid.c": _STUB_C.format(name="mid"),
        },
    },
    "xen": {
        "kconfig": ["arch/x86/xen/Kconfig", "drivers/xen/Kconfig"],
        "files": {
            "Makefile": "obj-y += drivers/\n",
            "drivers/Makefile": "obj-$(CONFIG_XEN) += xen/\n",
            "arch/x86/xen/Kconfig": '''config PARAVIRT
	bool "Enable paravirtualization code"

config XEN
	bool "Xen guest support"
	depends on PARAVIRT
	select XEN_HAVE_VPMU
	help
	  This is the Linux Xen port.
''',
            "drivers/xen/Kconfig": '''config SYSFS
	bool "sysfs file system support"
	default y

menu "Xen driver support"
	depends on XEN

config XEN_SYS_HYPERVISOR
	bool "Create xen entries under /sys/hypervisor"
	depends on SYSFS
	default y
	help
	  Create entries under /sys/hypervisor describing the Xen
	  hypervisor environment.

endmenu

config XEN_HAVE_VPMU
	bool
''',
            "drivers/xen/Makefile": '''obj-y += grant-table.o
obj-$(CONFIG_XEN_SYS_HYPERVISOR) += sys-hypervisor.o
''',
            "drivers/xen/grant-table.c": _STUB_C.format(name="gnttab"),
            "drivers/xen/sys-hypervisor.c": '''#include <linux/kernel.h>
#include <linux/init.h>

static int __init hypervisor_subsys_init(void)
{
	int ret = 0;

#ifdef CONFIG_XEN_HAVE_VPMU
	pr_info("xen: virtual performance monitoring unit available\\n");
#endif
	return ret;
}
''',
        },
    },
    "tristate": {
        "kconfig": ["net/Kconfig"],
        "files": {
            "Makefile": "obj-$(CONFIG_NET_CORE) += net/\n",
            "net/Kconfig": '''config NET_CORE
	bool "Network core driver support"
	default y

config NET_DRV
	tristate "Example network driver"
	help
	  Not constrained by NET_CORE although its directory is.
''',
            "net/Makefile": "obj-y += core.o\nobj-$(CONFIG_NET_DRV) += drv.o\n",
            "net/core.c": _STUB_C.format(name="core"),
            "net/drv.c": _STUB_C.format(name="drv"),
        },
    },
}

FIXTURES: dict[str, tuple[str, ...]] = {
    "ath5k": ("ath5k",),
    "vendor": ("vendor",),
    "hsu": ("hsu",),
    "xen": ("xen",),
    "tristate": ("tristate",),
    "four_category": ("ath5k", "vendor", "hsu", "xen"),
}

FIXTURE_LABELS: dict[str, dict[str, str]] = {
    "ath5k": {"ATH_PCI": "IneffectiveOption"},
    "vendor": {"NET_VENDOR_QUALCOMM": "VendorSubmenu"},
    "hsu": {"HSU_DMA_PCI": "IgnoredInvisible"},
    "xen": {"XEN_HAVE_VPMU": "Capability"},
    "tristate": {"NET_DRV": "IneffectiveOption"},
    "four_category": {"ATH_PCI": "IneffectiveOption", "NET_VENDOR_QUALCOMM": "VendorSubmenu",
                      "HSU_DMA_PCI": "IgnoredInvisible", "XEN_HAVE_VPMU": "Capability"},
}


def fixture_files(name: str) -> dict[str, str]:
    """Path to contents for a fixture; shared makefiles are merged."""
    try:
        parts = FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
    files: dict[str, str] = {}
    sources: list[str] = []
    for part in parts:
        scenario = SCENARIOS[part]
        sources += scenario["kconfig"]
        for path, text in scenario["files"].items():
            if path in files and os.path.basename(path) in ("Makefile", "Kbuild"):
                have = files[path].splitlines()
                extra = [ln for ln in text.splitlines() if ln not in have]
                files[path] = "\n".join(have + extra) + "\n"
            else:
                files[path] = text
    files["Kconfig"] = _BASE_KCONFIG + "".join(f'\nsource "{s}"' for s in sources) + "\n"
    return dict(sorted(files.items()))


def write_fixture(name: str, dest: str) -> str:
    """Write fixture ``name`` under ``dest`` and return ``dest``."""
    for path, text in fixture_files(name).items():
        full = os.path.join(dest, path)
        os.makedirs(os.path.dirname(full) or dest, exist_ok=True)
        with open(full, "w", encoding="utf-8") as fh:
            fh.write(text)
    return dest
