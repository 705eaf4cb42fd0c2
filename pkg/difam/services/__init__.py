"""Library service layer."""
