public class CompressString {
    public static int main(String[] args) {
        String s = "aaabccdddd";
        StringBuilder sb = new StringBuilder();
        int count = 1;
        for (int i = 1; i <= s.length(); i++) {
            if (i < s.length() && s.charAt(i) == s.charAt(i - 1)) {
                count++;
            } else {
                sb.append(s.charAt(i - 1));
                if (count > 1) {
                    sb.append(count);
                }
                count = 1;
            }
        }
        String compressed = sb.toString();
        int length = compressed.length();
        return length;
    }
}
